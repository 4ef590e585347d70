#include "handover/reward.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace handover {

int ContactState::count() const {
  int n = 0;
  for (bool f : flags) n += f ? 1 : 0;
  return n;
}

std::uint32_t ContactState::mask() const {
  std::uint32_t m = 0;
  for (int i = 0; i < kNumContactPads; ++i) {
    if (flags[i]) m |= 1u << i;
  }
  return m;
}

std::array<double, kNumContactPads> default_contact_weights() {
  std::array<double, kNumContactPads> w{};
  w[kPalmPad] = 0.28;
  for (Finger f : {Finger::kIndex, Finger::kMiddle, Finger::kRing,
                   Finger::kThumb}) {
    w[contact_index(f, Phalange::kProximal)] = 0.09;
    w[contact_index(f, Phalange::kMedial)] = 0.06;
    w[contact_index(f, Phalange::kDistal)] = 0.03;
  }
  return w;
}

void RewardParams::validate() const {
  weights.validate();
  if (!(eta0 > 0.0) || !(alpha > 0.0)) {
    throw std::invalid_argument("RewardParams: eta0 and alpha must be > 0");
  }
  if (!(gamma >= 0.0) || !(gamma <= 1.0)) {
    throw std::invalid_argument("RewardParams: gamma must be in [0, 1]");
  }
  if (!(target_tolerance > 0.0)) {
    throw std::invalid_argument("RewardParams: target_tolerance must be > 0");
  }
  double sum = 0.0;
  for (double w : contact_weights) {
    if (w < 0.0) {
      throw std::invalid_argument(
          "RewardParams: contact weights must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("RewardParams: contact weights must sum to 1");
  }
  for (Finger f : {Finger::kIndex, Finger::kMiddle, Finger::kRing,
                   Finger::kThumb}) {
    const double p = contact_weights[contact_index(f, Phalange::kProximal)];
    const double m = contact_weights[contact_index(f, Phalange::kMedial)];
    const double d = contact_weights[contact_index(f, Phalange::kDistal)];
    if (p < m || m < d) {
      throw std::invalid_argument(
          "RewardParams: contact weights must not increase from proximal "
          "to distal");
    }
  }
}

namespace {

double pair_distance(const Pose& a, const Pose& b, const RewardParams& p) {
  if (p.maneuver_translation_only) return translation_distance(a, b);
  return pose_distance(p.metric, a, b, p.weights);
}

}  // namespace

bool maneuver_ok(const FrameSet& frames, const MetricFn& metric) {
  const double d_t = metric(frames.hand_palm, frames.object_grasp);
  const double d_robots = metric(frames.hand_palm, frames.giver_palm);
  const double d_back = metric(frames.hand_back, frames.object_grasp);
  return d_robots > d_t && d_back > d_t;
}

bool maneuver_ok(const FrameSet& frames, const RewardParams& params) {
  const double d_t =
      pair_distance(frames.hand_palm, frames.object_grasp, params);
  const double d_robots =
      pair_distance(frames.hand_palm, frames.giver_palm, params);
  const double d_back =
      pair_distance(frames.hand_back, frames.object_grasp, params);
  return d_robots > d_t && d_back > d_t;
}

int step_modifier(double d_t, std::optional<double> d_prev, bool man_ok) {
  const bool improved = d_prev.has_value() && d_t < *d_prev;
  return (improved && man_ok) ? 1 : -1;
}

double contact_eta(const ContactState& contacts, double eta0) {
  return eta0 / (contacts.count() + 1);
}

double base_reward(double d_t, const ContactState& contacts, double eta0) {
  if (d_t < 0.0) {
    throw std::invalid_argument("base_reward: distance must be >= 0");
  }
  return contact_eta(contacts, eta0) * std::exp(-d_t);
}

double contact_bonus(const ContactState& contacts,
                     const std::array<double, kNumContactPads>& weights) {
  double sum = 0.0;
  for (int i = 0; i < kNumContactPads; ++i) {
    if (contacts.flags[i]) sum += weights[i];
  }
  return sum;
}

bool grasp_trigger(const ContactState& contacts) {
  bool thumb = false;
  bool other = false;
  for (Phalange p : {Phalange::kProximal, Phalange::kMedial,
                     Phalange::kDistal}) {
    thumb = thumb || contacts.pad(Finger::kThumb, p);
    for (Finger f : {Finger::kIndex, Finger::kMiddle, Finger::kRing}) {
      other = other || contacts.pad(f, p);
    }
  }
  return thumb && other;
}

RewardStep total_reward(const FrameSet& frames, const ContactState& contacts,
                        const PhaseState& phase, const RewardParams& params) {
  params.validate();
  RewardStep out;
  out.next = phase;
  out.d_t = pose_distance(params.metric, frames.hand_palm,
                          frames.object_grasp, params.weights);
  out.d_tgt = pose_distance(params.metric, frames.object_grasp, frames.home,
                            params.weights);
  out.man_ok = maneuver_ok(frames, params);
  out.m_t = step_modifier(out.d_t, phase.prev_distance, out.man_ok);
  out.eta = contact_eta(contacts, params.eta0);

  const bool was_grasped = phase.grasped;
  out.next.grasped = was_grasped || grasp_trigger(contacts);
  out.newly_grasped = out.next.grasped && !was_grasped;

  const double bonus_c = contact_bonus(contacts, params.contact_weights);
  if (out.next.grasped) {
    out.reward = params.alpha * std::exp(-out.d_tgt) + bonus_c;
    if (out.newly_grasped && !phase.grasp_bonus_paid) {
      out.reward += params.grasp_bonus;
      out.next.grasp_bonus_paid = true;
    }
    if (out.d_tgt < params.target_tolerance && !phase.target_bonus_paid) {
      out.reward += params.target_bonus;
      out.next.target_bonus_paid = true;
    }
  } else {
    out.reward = out.m_t * base_reward(out.d_t, contacts, params.eta0) +
                 bonus_c;
  }
  out.next.prev_distance = out.d_t;
  return out;
}

double discounted_return(std::span<const double> rewards, double gamma) {
  double acc = 0.0;
  double g = 1.0;
  for (double r : rewards) {
    acc += g * r;
    g *= gamma;
  }
  return acc;
}

}  // namespace handover
