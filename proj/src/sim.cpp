#include "handover/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace handover {
namespace {

// Pad anchors in the palm frame. +x is the palm normal (toward the object
// when grasping); index/middle/ring sit at +y and spread along z, the thumb
// opposes at -y. Sized so that at a perfect grasp of the built-in objects
// the palm, proximal and medial pads are within the contact epsilon while
// the distal pads stay outside it.
constexpr double kPhalangeX[3] = {0.012, 0.028, 0.048};
constexpr double kPhalangeY[3] = {0.025, 0.022, 0.024};
constexpr double kFingerZ[4] = {0.03, 0.0, -0.03, 0.0};

Eigen::Vector3d pad_anchor(Finger f, Phalange p) {
  const int fi = static_cast<int>(f);
  const int pi = static_cast<int>(p);
  const double side = (f == Finger::kThumb) ? -1.0 : 1.0;
  return {kPhalangeX[pi], side * kPhalangeY[pi], kFingerZ[fi]};
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void refresh_held_object(SimState& s, const SimConfig& cfg) {
  const Pose grasp{cfg.nominal_grasp + s.cube_offset,
                   euler_xyz_to_quat(s.rpy_params)};
  s.frames.object_grasp = grasp;
  s.object_center = compose(grasp, inverse(cfg.object.grasp_offset));
  s.frames.giver_palm = compose(s.object_center, cfg.object.giver_grip_offset);
}

// Moves x along direction d by exactly `speed_step` per call, flipping a
// direction component (billiard bounce) whenever the next position would
// leave [lo, hi]. The final clamp only engages when a range is narrower
// than one step.
void bounce_advance(Eigen::Vector3d& x, Eigen::Vector3d& d, double step,
                    const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  for (int i = 0; i < 3; ++i) {
    double next = x[i] + step * d[i];
    if (next > hi[i] || next < lo[i]) {
      d[i] = -d[i];
      next = std::clamp(x[i] + step * d[i], lo[i], hi[i]);
    }
    x[i] = next;
  }
}

void advance_perturbation(SimState& s, const SimConfig& cfg) {
  const double h = cfg.reset_cube_half_extent;
  const Eigen::Vector3d lin_lo{-h, -h, -h};
  const Eigen::Vector3d lin_hi{h, h, h};
  bounce_advance(s.cube_offset, s.perturb_dir_lin,
                 cfg.perturb_linear_speed * cfg.control_dt, lin_lo, lin_hi);
  const Eigen::Vector3d rot_hi{cfg.reset_rot_roll_yaw, cfg.reset_rot_pitch,
                               cfg.reset_rot_roll_yaw};
  bounce_advance(s.rpy_params, s.perturb_dir_rot,
                 cfg.perturb_angular_speed * cfg.control_dt, -rot_hi, rot_hi);
}

Phase classify_phase(const SimState& s, bool man_ok) {
  if (s.phase.grasped) return Phase::kManipulation;
  if (s.contacts.count() > 0) return Phase::kHandover;
  if (man_ok) return Phase::kApproach;
  return Phase::kManeuver;
}

}  // namespace

double ObjectSpec::surface_distance(const Eigen::Vector3d& p) const {
  if (shape == ObjectShape::kPrism) {
    const Eigen::Vector3d q = p.cwiseAbs() - 0.5 * prism_extents;
    const double outside = q.cwiseMax(0.0).norm();
    const double inside = std::min(q.maxCoeff(), 0.0);
    return outside + inside;
  }
  const double dr = std::hypot(p.x(), p.y()) - cylinder_radius;
  const double dz = std::abs(p.z()) - 0.5 * cylinder_length;
  const Eigen::Vector2d q{std::max(dr, 0.0), std::max(dz, 0.0)};
  return std::min(std::max(dr, dz), 0.0) + q.norm();
}

void ObjectSpec::validate() const {
  if (shape == ObjectShape::kPrism) {
    if (!(prism_extents.minCoeff() > 0.0)) {
      throw std::invalid_argument("ObjectSpec: prism extents must be > 0");
    }
  } else if (!(cylinder_radius > 0.0) || !(cylinder_length > 0.0)) {
    throw std::invalid_argument(
        "ObjectSpec: cylinder radius and length must be > 0");
  }
}

namespace {

// The receiver grasps the -x face a fixed 0.10 m above the lower end; the
// giver grips the opposite face 0.05 m below the upper end, facing the
// receiver (pi about z).
ObjectSpec make_object(ObjectShape shape, double half_width,
                       double half_length, const std::string& name) {
  ObjectSpec o;
  o.shape = shape;
  o.name = name;
  if (shape == ObjectShape::kPrism) {
    o.prism_extents = {2.0 * half_width, 2.0 * half_width, 2.0 * half_length};
  } else {
    o.cylinder_radius = half_width;
    o.cylinder_length = 2.0 * half_length;
  }
  o.grasp_offset =
      Pose{{-half_width, 0.0, -(half_length - 0.10)}, Quaternion::identity()};
  o.giver_grip_offset = Pose{{half_width, 0.0, half_length - 0.05},
                             Quaternion{0.0, 0.0, 0.0, 1.0}};
  return o;
}

}  // namespace

ObjectSpec ObjectSpec::prism() {
  return make_object(ObjectShape::kPrism, 0.0175, 0.225, "prism");
}

ObjectSpec ObjectSpec::short_prism() {
  return make_object(ObjectShape::kPrism, 0.0175, 0.175, "short_prism");
}

ObjectSpec ObjectSpec::cylinder() {
  return make_object(ObjectShape::kCylinder, 0.019, 0.225, "cylinder");
}

ObjectSpec ObjectSpec::short_cylinder() {
  return make_object(ObjectShape::kCylinder, 0.019, 0.175, "short_cylinder");
}

ObjectSpec ObjectSpec::by_name(const std::string& name) {
  if (name == "prism") return prism();
  if (name == "short_prism") return short_prism();
  if (name == "cylinder") return cylinder();
  if (name == "short_cylinder") return short_cylinder();
  throw std::invalid_argument(
      "unknown object '" + name +
      "' (expected prism, short_prism, cylinder or short_cylinder)");
}

void SimConfig::validate() const {
  if (!(reset_cube_half_extent >= 0.0) || !(reset_rot_roll_yaw >= 0.0) ||
      !(reset_rot_pitch >= 0.0)) {
    throw std::invalid_argument("SimConfig: reset ranges must be >= 0");
  }
  if (max_steps < 1) {
    throw std::invalid_argument("SimConfig: max_steps must be >= 1");
  }
  if (!(action_translation_limit > 0.0) || !(action_rotation_limit > 0.0) ||
      !(joint_limit > 0.0)) {
    throw std::invalid_argument("SimConfig: action limits must be > 0");
  }
  if (!(perturb_linear_speed > 0.0) || !(perturb_angular_speed > 0.0)) {
    throw std::invalid_argument("SimConfig: perturbation speeds must be > 0");
  }
  if (!(control_dt > 0.0)) {
    throw std::invalid_argument("SimConfig: control_dt must be > 0");
  }
  if (fall_window < 1) {
    throw std::invalid_argument("SimConfig: fall_window must be >= 1");
  }
  if (!(contact_epsilon > 0.0)) {
    throw std::invalid_argument("SimConfig: contact_epsilon must be > 0");
  }
  if (!(joint_thresholds.x() > 0.0) ||
      !(joint_thresholds.y() >= joint_thresholds.x()) ||
      !(joint_thresholds.z() >= joint_thresholds.y())) {
    throw std::invalid_argument(
        "SimConfig: joint thresholds must be positive and non-decreasing");
  }
  if (!(joint_max >= joint_thresholds.z())) {
    throw std::invalid_argument(
        "SimConfig: joint_max must cover the distal threshold");
  }
  if (obs_noise_std < 0.0) {
    throw std::invalid_argument("SimConfig: obs_noise_std must be >= 0");
  }
  object.validate();
  reward.validate();
}

Eigen::Matrix<double, Observation::kDim, 1> Observation::flatten() const {
  Eigen::Matrix<double, kDim, 1> v;
  v << receiver_translation, receiver_euler, object_translation, object_euler,
      hand_joints;
  return v;
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kPending:
      return "pending";
    case Outcome::kSuccess:
      return "success";
    case Outcome::kFail:
      return "fail";
    case Outcome::kTimeout:
      return "timeout";
  }
  throw std::invalid_argument("outcome_name: bad Outcome");
}

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::kManeuver:
      return "maneuver";
    case Phase::kApproach:
      return "approach";
    case Phase::kHandover:
      return "handover";
    case Phase::kManipulation:
      return "manipulation";
  }
  throw std::invalid_argument("phase_name: bad Phase");
}

bool identical(const SimState& a, const SimState& b) {
  auto veq = [](const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    return (u.array() == v.array()).all();
  };
  return pose_identical(a.frames.hand_palm, b.frames.hand_palm) &&
         pose_identical(a.frames.hand_back, b.frames.hand_back) &&
         pose_identical(a.frames.giver_palm, b.frames.giver_palm) &&
         pose_identical(a.frames.object_grasp, b.frames.object_grasp) &&
         pose_identical(a.frames.home, b.frames.home) &&
         pose_identical(a.object_center, b.object_center) &&
         veq(a.hand_joints, b.hand_joints) && a.giver_open == b.giver_open &&
         a.step_index == b.step_index && a.contacts.mask() == b.contacts.mask() &&
         a.phase.grasped == b.phase.grasped &&
         a.phase.prev_distance == b.phase.prev_distance &&
         a.phase.grasp_bonus_paid == b.phase.grasp_bonus_paid &&
         a.phase.target_bonus_paid == b.phase.target_bonus_paid &&
         a.rng == b.rng && veq(a.cube_offset, b.cube_offset) &&
         veq(a.rpy_params, b.rpy_params) &&
         veq(a.perturb_dir_lin, b.perturb_dir_lin) &&
         veq(a.perturb_dir_rot, b.perturb_dir_rot) &&
         pose_identical(a.attach, b.attach) && a.falling == b.falling &&
         a.falling_steps == b.falling_steps && a.done == b.done &&
         a.outcome == b.outcome;
}

SimState reset(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SimState s;
  s.rng = Rng(seed);
  const double h = cfg.reset_cube_half_extent;
  s.cube_offset = {s.rng.uniform(-h, h), s.rng.uniform(-h, h),
                   s.rng.uniform(-h, h)};
  const double ry = cfg.reset_rot_roll_yaw;
  const double rp = cfg.reset_rot_pitch;
  s.rpy_params = {s.rng.uniform(-ry, ry), s.rng.uniform(-rp, rp),
                  s.rng.uniform(-ry, ry)};
  if (cfg.perturbation) {
    s.perturb_dir_lin = s.rng.unit_vector();
    s.perturb_dir_rot = s.rng.unit_vector();
  }
  s.frames.home = cfg.home;
  s.frames.hand_palm = cfg.home;
  s.frames.hand_back = compose(s.frames.hand_palm, cfg.palm_back_offset);
  refresh_held_object(s, cfg);
  s.contacts = contact_proxy(s, cfg);
  return s;
}

ContactState contact_proxy(const SimState& s, const SimConfig& cfg) {
  ContactState out;
  const Pose to_object = inverse(s.object_center);
  auto fires = [&](const Eigen::Vector3d& anchor) {
    const Eigen::Vector3d p = to_object.apply(s.frames.hand_palm.apply(anchor));
    return cfg.object.surface_distance(p) <= cfg.contact_epsilon;
  };
  out.flags[kPalmPad] = fires(Eigen::Vector3d::Zero());
  for (Finger f : {Finger::kIndex, Finger::kMiddle, Finger::kRing,
                   Finger::kThumb}) {
    for (Phalange p : {Phalange::kProximal, Phalange::kMedial,
                       Phalange::kDistal}) {
      const int pi = static_cast<int>(p);
      if (s.hand_joints[pi] < cfg.joint_thresholds[pi]) continue;
      out.flags[contact_index(f, p)] = fires(pad_anchor(f, p));
    }
  }
  return out;
}

Pose integrate_pose(const Pose& p, const Eigen::Vector3d& d_translation,
                    const Eigen::Vector3d& d_euler) {
  Pose out;
  out.translation = p.translation + d_translation;
  out.rotation =
      quat_mul(euler_xyz_to_quat(d_euler), p.rotation).normalized();
  return out;
}

Action clamp_action(const Action& a, const SimConfig& cfg) {
  auto clamp3 = [](const Eigen::Vector3d& v, double lim) {
    return v.cwiseMax(-lim).cwiseMin(lim);
  };
  Action out;
  out.d_translation = clamp3(a.d_translation, cfg.action_translation_limit);
  out.d_euler = clamp3(a.d_euler, cfg.action_rotation_limit);
  out.d_joints = clamp3(a.d_joints, cfg.joint_limit);
  return out;
}

Observation observe(SimState& s, const SimConfig& cfg) {
  Observation o;
  o.receiver_translation = s.frames.hand_palm.translation;
  o.receiver_euler = s.frames.hand_palm.euler_xyz();
  o.object_translation = s.object_center.translation;
  o.object_euler = s.object_center.euler_xyz();
  o.hand_joints = s.hand_joints;
  if (cfg.obs_noise_std > 0.0) {
    auto jitter = [&](Eigen::Vector3d& v, bool angular) {
      for (int i = 0; i < 3; ++i) {
        v[i] += cfg.obs_noise_std * s.rng.normal();
        if (angular) v[i] = wrap_angle(v[i]);
      }
    };
    jitter(o.receiver_translation, false);
    jitter(o.receiver_euler, true);
    jitter(o.object_translation, false);
    jitter(o.object_euler, true);
  }
  return o;
}

StepOutput step(SimState& s, const Action& action, const SimConfig& cfg) {
  if (s.done) {
    throw std::logic_error("step: episode already finished");
  }
  const Action a = clamp_action(action, cfg);
  s.frames.hand_palm =
      integrate_pose(s.frames.hand_palm, a.d_translation, a.d_euler);
  s.frames.hand_back = compose(s.frames.hand_palm, cfg.palm_back_offset);
  s.hand_joints =
      (s.hand_joints + a.d_joints).cwiseMax(0.0).cwiseMin(cfg.joint_max);

  if (s.phase.grasped) {
    // Rigid carry; the giver stays where it opened.
    s.object_center = compose(s.frames.hand_palm, s.attach);
    s.frames.object_grasp = compose(s.object_center, cfg.object.grasp_offset);
  } else if (!s.giver_open) {
    if (cfg.perturbation) advance_perturbation(s, cfg);
    refresh_held_object(s, cfg);
  }
  // else: released but not grasped — the object hangs in its last pose
  // while the fall window runs down.

  s.contacts = contact_proxy(s, cfg);
  const RewardStep rs = total_reward(s.frames, s.contacts, s.phase,
                                     cfg.reward);
  s.phase = rs.next;
  if (rs.newly_grasped) {
    s.giver_open = true;
    s.attach = compose(inverse(s.frames.hand_palm), s.object_center);
  }
  if (s.giver_open && !s.phase.grasped) {
    s.falling = true;
    s.falling_steps += 1;
  }
  if (!std::isfinite(rs.reward) || !std::isfinite(rs.d_t)) {
    throw std::runtime_error("step: non-finite reward or distance");
  }

  StepRecord rec;
  rec.step = s.step_index;
  s.step_index += 1;
  rec.phase = classify_phase(s, rs.man_ok);
  rec.d_global = rs.d_t;
  rec.d_trans =
      translation_distance(s.frames.hand_palm, s.frames.object_grasp);
  rec.d_rot = rotation_term(cfg.reward.metric, s.frames.hand_palm,
                            s.frames.object_grasp, cfg.reward.weights);
  rec.reward = rs.reward;
  rec.m_t = rs.m_t;
  rec.eta = rs.eta;
  rec.contact_mask = s.contacts.mask();
  rec.grasped = s.phase.grasped;
  rec.d_tgt = rs.d_tgt;
  rec.falling = s.falling && !s.phase.grasped;

  if (s.phase.grasped && rs.d_tgt < cfg.reward.target_tolerance) {
    s.done = true;
    s.outcome = Outcome::kSuccess;
  } else if (s.falling && s.falling_steps >= cfg.fall_window) {
    s.done = true;
    s.outcome = Outcome::kFail;
  } else if (s.step_index >= cfg.max_steps) {
    s.done = true;
    s.outcome = Outcome::kTimeout;
  }
  rec.outcome = s.done ? s.outcome : Outcome::kPending;

  StepOutput out;
  out.obs = observe(s, cfg);
  out.reward = rs.reward;
  out.done = s.done;
  out.outcome = s.outcome;
  out.record = rec;
  return out;
}

Outcome classify_outcome(const EpisodeLog& log) {
  if (log.steps.empty()) {
    throw std::invalid_argument("classify_outcome: empty episode");
  }
  const StepRecord& last = log.steps.back();
  if (last.grasped && last.d_tgt < log.target_tolerance) {
    return Outcome::kSuccess;
  }
  int trailing = 0;
  for (auto it = log.steps.rbegin(); it != log.steps.rend(); ++it) {
    if (it->falling && !it->grasped) {
      ++trailing;
    } else {
      break;
    }
  }
  if (trailing >= log.fall_window) return Outcome::kFail;
  return Outcome::kTimeout;
}

void write_episode_csv(std::ostream& os, const EpisodeLog& log) {
  os << "step,phase,d_global,d_trans,d_rot,reward,m_t,eta,contact_mask,"
        "grasped,outcome\n";
  for (const StepRecord& r : log.steps) {
    os << r.step << ',' << phase_name(r.phase) << ',' << fmt_double(r.d_global)
       << ',' << fmt_double(r.d_trans) << ',' << fmt_double(r.d_rot) << ','
       << fmt_double(r.reward) << ',' << r.m_t << ',' << fmt_double(r.eta)
       << ',' << r.contact_mask << ',' << (r.grasped ? 1 : 0) << ','
       << outcome_name(r.outcome) << '\n';
  }
}

}  // namespace handover
