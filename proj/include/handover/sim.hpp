#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "handover/pose.hpp"
#include "handover/reward.hpp"
#include "handover/rng.hpp"

namespace handover {

enum class ObjectShape { kPrism, kCylinder };

// Handover object: an elongated shape whose long axis is local z. The
// receiver grasps the lower (-z) end on the -x face; the giver grips the
// upper end from the opposite side.
struct ObjectSpec {
  ObjectShape shape = ObjectShape::kPrism;
  // Full x/y/z extents (prism only).
  Eigen::Vector3d prism_extents{0.035, 0.035, 0.45};
  // Cylinder only; the axis is local z.
  double cylinder_radius = 0.019;
  double cylinder_length = 0.45;
  // Object center -> target grasp frame on the surface.
  Pose grasp_offset;
  // Object center -> giver gripper frame.
  Pose giver_grip_offset;
  std::string name = "prism";

  // Signed distance from a point (object frame) to the object surface;
  // negative inside.
  double surface_distance(const Eigen::Vector3d& p) const;

  void validate() const;

  static ObjectSpec prism();
  static ObjectSpec short_prism();
  static ObjectSpec cylinder();
  static ObjectSpec short_cylinder();
  // Accepts prism | short_prism | cylinder | short_cylinder.
  static ObjectSpec by_name(const std::string& name);
};

struct SimConfig {
  // Reset randomization: the grasp frame is drawn uniformly in a cube of
  // this half-extent around nominal_grasp, with uniform roll/yaw and pitch
  // perturbations of the grasp orientation.
  double reset_cube_half_extent = 0.15;
  double reset_rot_roll_yaw = 0.3;
  double reset_rot_pitch = 0.6;
  int max_steps = 500;
  // Per-step action clamps, applied per component.
  double action_translation_limit = 0.01;
  double action_rotation_limit = 0.05;
  double joint_limit = 0.05;
  // Giver-motion perturbation: when enabled the sampled reset parameters
  // drift at these speeds along a fixed random direction, bouncing off the
  // randomization bounds so the held object never leaves the reset region.
  bool perturbation = false;
  double perturb_linear_speed = 0.03;   // m/s
  double perturb_angular_speed = 0.16;  // rad/s
  double control_dt = 1.0 / 30.0;
  // Steps of giver-open-without-grasp before the object counts as dropped.
  int fall_window = 15;
  // Contact proxy: pad anchors fire within this distance of the object
  // surface, gated by per-phalange closure thresholds on the global joints.
  double contact_epsilon = 0.01;
  Eigen::Vector3d joint_thresholds{0.3, 0.6, 0.9};
  double joint_max = 1.6;
  // Optional Gaussian noise on observed pose components; off by default.
  double obs_noise_std = 0.0;
  // Receiver start pose; also the delivery target.
  Pose home{{0.0, 0.0, 0.5}, Quaternion::identity()};
  // Cube center for the grasp-frame randomization.
  Eigen::Vector3d nominal_grasp{0.55, 0.0, 0.5};
  // Palm -> back-of-hand rigid offset.
  Pose palm_back_offset{{-0.05, 0.0, 0.0},
                        Quaternion{0.0, 0.0, 0.0, 1.0}};
  ObjectSpec object = ObjectSpec::prism();
  RewardParams reward;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Action {
  Eigen::Vector3d d_translation = Eigen::Vector3d::Zero();
  Eigen::Vector3d d_euler = Eigen::Vector3d::Zero();
  Eigen::Vector3d d_joints = Eigen::Vector3d::Zero();
};

// Flat policy view: receiver translation + Euler, object-center translation
// + Euler (all wrapped to (-pi, pi]), then the three global joint values.
struct Observation {
  Eigen::Vector3d receiver_translation = Eigen::Vector3d::Zero();
  Eigen::Vector3d receiver_euler = Eigen::Vector3d::Zero();
  Eigen::Vector3d object_translation = Eigen::Vector3d::Zero();
  Eigen::Vector3d object_euler = Eigen::Vector3d::Zero();
  Eigen::Vector3d hand_joints = Eigen::Vector3d::Zero();

  static constexpr int kDim = 15;
  Eigen::Matrix<double, kDim, 1> flatten() const;
};

enum class Outcome { kPending, kSuccess, kFail, kTimeout };
const char* outcome_name(Outcome o);

enum class Phase { kManeuver, kApproach, kHandover, kManipulation };
const char* phase_name(Phase p);

struct SimState {
  FrameSet frames;
  Pose object_center;
  Eigen::Vector3d hand_joints = Eigen::Vector3d::Zero();
  bool giver_open = false;
  int step_index = 0;
  ContactState contacts;
  PhaseState phase;
  Rng rng;
  // Sampled episode parameters; the grasp frame is nominal_grasp +
  // cube_offset rotated (about its own origin) by rpy_params.
  Eigen::Vector3d cube_offset = Eigen::Vector3d::Zero();
  Eigen::Vector3d rpy_params = Eigen::Vector3d::Zero();
  // Fixed perturbation directions in parameter space (unit vectors).
  Eigen::Vector3d perturb_dir_lin = Eigen::Vector3d::Zero();
  Eigen::Vector3d perturb_dir_rot = Eigen::Vector3d::Zero();
  // Object center in the palm frame, valid while grasped.
  Pose attach;
  bool falling = false;
  int falling_steps = 0;
  bool done = false;
  Outcome outcome = Outcome::kPending;
};

// Exact (bitwise) state comparison, for determinism checks.
bool identical(const SimState& a, const SimState& b);

// One log row. d_global is the full configured metric between palm and
// grasp frame, d_trans the raw translation gap, d_rot the metric's rotation
// term. d_tgt and falling stay in memory; the CSV carries the rest.
struct StepRecord {
  int step = 0;
  Phase phase = Phase::kManeuver;
  double d_global = 0.0;
  double d_trans = 0.0;
  double d_rot = 0.0;
  double reward = 0.0;
  int m_t = -1;
  double eta = 0.0;
  std::uint32_t contact_mask = 0;
  bool grasped = false;
  Outcome outcome = Outcome::kPending;
  double d_tgt = 0.0;
  bool falling = false;
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  Outcome outcome = Outcome::kPending;
  // Episode-level copies of the classification parameters.
  double target_tolerance = 0.05;
  int max_steps = 500;
  int fall_window = 15;
  double discounted = 0.0;
  int grasp_step = -1;
};

// Deterministic given (cfg, seed): samples the grasp frame in the reset
// cube with the configured orientation ranges, places the object and giver
// around it, and puts the receiver at home with open fingers.
SimState reset(const SimConfig& cfg, std::uint64_t seed);

struct StepOutput {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  Outcome outcome = Outcome::kPending;
  StepRecord record;
};

// Advances one control step: clamps the action, integrates the receiver
// pose and joints, moves the giver-held object (perturbation) or carries it
// rigidly when grasped, recomputes contacts and the phased reward, and
// decides the outcome. Throws std::logic_error on a finished state.
StepOutput step(SimState& s, const Action& a, const SimConfig& cfg);

// Proximity contact proxy: a pad fires iff its palm-frame anchor is within
// contact_epsilon of the object surface and the matching global joint
// exceeds the per-phalange closure threshold; the palm pad is gated by
// proximity only.
ContactState contact_proxy(const SimState& s, const SimConfig& cfg);

// Observation of the current state; draws noise from the state RNG only
// when obs_noise_std > 0.
Observation observe(SimState& s, const SimConfig& cfg);

// Re-derives the outcome label from a finished log: success iff the final
// row is grasped with d_tgt under tolerance, fail iff the trailing falling
// streak filled the fall window, timeout otherwise.
Outcome classify_outcome(const EpisodeLog& log);

// Shared pose integrator: translation adds, rotation composes the Euler
// increment's quaternion on the left (world frame).
Pose integrate_pose(const Pose& p, const Eigen::Vector3d& d_translation,
                    const Eigen::Vector3d& d_euler);

Action clamp_action(const Action& a, const SimConfig& cfg);

// CSV: step,phase,d_global,d_trans,d_rot,reward,m_t,eta,contact_mask,
// grasped,outcome — header row included, '.' decimal separator.
void write_episode_csv(std::ostream& os, const EpisodeLog& log);

}  // namespace handover
