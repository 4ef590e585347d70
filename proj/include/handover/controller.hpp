#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "handover/metrics.hpp"
#include "handover/sim.hpp"

namespace handover {

// Greedy distance-descent baseline. Each step probes signed moves of size
// descent_gain * probe_step on every action dimension and applies the
// combination that strictly lowers the objective (palm -> grasp frame
// before the grasp, object -> home after); ties keep the hand still. Once
// any pad is in contact the fingers close at joint_close_rate.
struct ControllerConfig {
  MetricKind metric = MetricKind::kDualQuat;
  MetricWeights weights;
  double probe_step = 0.005;
  double descent_gain = 2.0;
  double joint_close_rate = 0.05;

  // probe_step must be positive and the applied move (descent_gain *
  // probe_step) must fit inside every sim action limit, otherwise the
  // descent guarantee would be clipped away.
  void validate(const SimConfig& sim) const;
};

Action greedy_step(const SimState& s, const ControllerConfig& cfg);

// Policy stand-in: action = weight * obs + bias, rows ordered translation,
// Euler increment, joint increment. The sim clamps the output.
struct LinearPolicy {
  Eigen::Matrix<double, 9, Observation::kDim> weight =
      Eigen::Matrix<double, 9, Observation::kDim>::Zero();
  Eigen::Matrix<double, 9, 1> bias = Eigen::Matrix<double, 9, 1>::Zero();

  Action act(const Observation& obs) const;
  // Throws std::invalid_argument on non-finite entries.
  void validate() const;

  void save(std::ostream& os) const;
  static LinearPolicy load(std::istream& is);
};

using ControllerFn =
    std::function<Action(const SimState&, const Observation&)>;

ControllerFn make_greedy(const ControllerConfig& cfg);
ControllerFn make_policy(const LinearPolicy& policy);

struct RolloutSummary {
  int episodes = 0;
  int successes = 0;
  int fails = 0;
  int timeouts = 0;
  double success_rate = 0.0;
  // 95% Wilson score interval on the success rate.
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double mean_return = 0.0;
  double mean_final_d_trans = 0.0;
  double mean_final_d_rot = 0.0;
  double mean_initial_d_rot = 0.0;
};

struct RolloutResult {
  std::vector<EpisodeLog> logs;
  RolloutSummary summary;
};

// One independent episode per seed; deterministic given (controller
// function, cfg, seeds).
RolloutResult rollout(const ControllerFn& controller, const SimConfig& cfg,
                      std::span<const std::uint64_t> seeds);

struct SearchConfig {
  int iterations = 200;
  int population = 32;
  double noise_scale = 0.05;
  // Zeroes the rotation and joint rows of every candidate, reducing the
  // search to the translation sub-task.
  bool translation_only = false;
  std::uint64_t seed = 0;
  // Evaluation episodes per candidate; fixed across the whole search.
  std::vector<std::uint64_t> eval_seeds;
};

struct SearchResult {
  LinearPolicy best;
  double initial_score = 0.0;
  // Incumbent mean return after each iteration; non-decreasing.
  std::vector<double> incumbent_scores;
};

// Best-of-population random search on mean discounted return over the
// evaluation seeds. The incumbent only ever moves to a strictly better
// candidate, so its score trace is monotone.
SearchResult random_search(const LinearPolicy& init, const SearchConfig& sc,
                           const SimConfig& cfg);

// Convenience overload with eval seeds derived from cfg.seed.
LinearPolicy random_search(const LinearPolicy& init, int iterations,
                           int population, double noise_scale,
                           const SimConfig& cfg);

double wilson_lower(int successes, int n);
double wilson_upper(int successes, int n);

}  // namespace handover
