#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "handover/metrics.hpp"
#include "handover/pose.hpp"

namespace handover {

inline constexpr int kNumContactPads = 13;

enum class Finger { kIndex = 0, kMiddle = 1, kRing = 2, kThumb = 3 };
enum class Phalange { kProximal = 0, kMedial = 1, kDistal = 2 };

// Flag index of a finger pad; the palm pad is index 0.
inline constexpr int kPalmPad = 0;
constexpr int contact_index(Finger f, Phalange p) {
  return 1 + 3 * static_cast<int>(f) + static_cast<int>(p);
}

// Boolean contact flags for the palm pad plus proximal/medial/distal pads
// of index, middle, ring and thumb, in that order.
struct ContactState {
  std::array<bool, kNumContactPads> flags{};

  bool palm() const { return flags[kPalmPad]; }
  bool pad(Finger f, Phalange p) const { return flags[contact_index(f, p)]; }
  int count() const;
  // Bit i of the mask mirrors flags[i].
  std::uint32_t mask() const;
};

// Weights of the per-pad contact bonus: palm 0.28 and per finger
// 0.09/0.06/0.03 proximal/medial/distal, summing to exactly 1.0 with the
// proximal pads weighted above the tips.
std::array<double, kNumContactPads> default_contact_weights();

// Poses feeding one reward evaluation, all in the world frame.
struct FrameSet {
  Pose hand_palm;     // receiver palm
  Pose hand_back;     // back of the receiver hand
  Pose giver_palm;    // giver gripper
  Pose object_grasp;  // grasp frame on the object
  Pose home;          // receiver start pose; also the manipulation target
};

struct RewardParams {
  MetricKind metric = MetricKind::kDualQuat;
  MetricWeights weights;
  // Ceiling of the shaped approach reward.
  double eta0 = 1.0;
  // Manipulation-phase gain.
  double alpha = 12.0;
  // One-shot bonuses for the grasp transition and for delivering the object.
  double grasp_bonus = 5.0;
  double target_bonus = 10.0;
  // The object counts as delivered when its distance to home drops below
  // this tolerance.
  double target_tolerance = 0.05;
  // When set, the approach-direction test compares plain translation
  // distances instead of full pose distances.
  bool maneuver_translation_only = false;
  std::array<double, kNumContactPads> contact_weights =
      default_contact_weights();
  // Discount factor for episode returns.
  double gamma = 0.99;

  // Contact weights must be non-negative, sum to 1 within 1e-9 and be
  // non-increasing proximal -> distal within each finger; throws
  // std::invalid_argument otherwise (also for bad gamma/eta0/alpha).
  void validate() const;
};

// Cross-step reward memory. prev_distance is the previous step's palm-to-
// grasp distance; empty on the first step. The bonus flags latch so each
// one-shot bonus is paid at most once per episode.
struct PhaseState {
  bool grasped = false;
  std::optional<double> prev_distance;
  bool grasp_bonus_paid = false;
  bool target_bonus_paid = false;
};

// Approach-direction test: the palm must be closer to the grasp frame than
// it is to the giver gripper, and closer than the back of the hand is to
// the grasp frame. Penalizes reaching around or past the object.
bool maneuver_ok(const FrameSet& frames, const MetricFn& metric);
// Same test honoring params.maneuver_translation_only.
bool maneuver_ok(const FrameSet& frames, const RewardParams& params);

// +1 when the palm got closer to the grasp frame this step and the approach
// direction is sound, else -1. An absent previous distance (first step)
// counts as no improvement.
int step_modifier(double d_t, std::optional<double> d_prev, bool man_ok);

// eta0 / (contact count + 1): contact attenuates the approach term so the
// shaped signal hands off to the contact bonus as the hand closes.
double contact_eta(const ContactState& contacts, double eta0 = 1.0);

// contact_eta * exp(-d_t); in (0, eta0] for d_t >= 0.
double base_reward(double d_t, const ContactState& contacts,
                   double eta0 = 1.0);

// Weighted contact bonus: sum of weights over pads in contact.
double contact_bonus(const ContactState& contacts,
                     const std::array<double, kNumContactPads>& weights);

// Grasp requires a thumb pad plus a pad of a different finger; the palm
// does not count as a finger.
bool grasp_trigger(const ContactState& contacts);

// One reward evaluation plus the updated phase memory and the diagnostics
// the step log records.
struct RewardStep {
  double reward = 0.0;
  PhaseState next;
  double d_t = 0.0;    // palm to grasp frame, full metric
  double d_tgt = 0.0;  // object to home, full metric
  bool man_ok = false;
  int m_t = -1;
  double eta = 0.0;
  bool newly_grasped = false;
};

// Phased reward. Grasped is updated first, so the triggering step is
// already paid under the manipulation branch:
//   not grasped:  m_t * base_reward + contact_bonus
//   grasped:      alpha * exp(-d_tgt) + contact_bonus
// plus grasp_bonus once on the false->true transition and target_bonus once
// when grasped and d_tgt < target_tolerance. prev_distance is always
// refreshed to this step's d_t.
RewardStep total_reward(const FrameSet& frames, const ContactState& contacts,
                        const PhaseState& phase, const RewardParams& params);

// sum_t gamma^t r_t.
double discounted_return(std::span<const double> rewards, double gamma);

}  // namespace handover
