#include "handover/controller.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "handover/reward.hpp"

namespace handover {
namespace {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

void ControllerConfig::validate(const SimConfig& sim) const {
  weights.validate();
  if (!(probe_step > 0.0) || !(descent_gain > 0.0)) {
    throw std::invalid_argument(
        "ControllerConfig: probe_step and descent_gain must be > 0");
  }
  if (!(joint_close_rate > 0.0)) {
    throw std::invalid_argument(
        "ControllerConfig: joint_close_rate must be > 0");
  }
  const double applied = descent_gain * probe_step;
  if (probe_step > sim.action_translation_limit ||
      probe_step > sim.action_rotation_limit ||
      applied > sim.action_translation_limit ||
      applied > sim.action_rotation_limit) {
    throw std::invalid_argument(
        "ControllerConfig: probe/applied step exceeds a sim action limit");
  }
  if (joint_close_rate > sim.joint_limit) {
    throw std::invalid_argument(
        "ControllerConfig: joint_close_rate exceeds the sim joint limit");
  }
}

Action greedy_step(const SimState& s, const ControllerConfig& cfg) {
  if (s.done) {
    throw std::logic_error("greedy_step: episode already finished");
  }
  const MetricFn metric = make_metric(cfg.metric, cfg.weights);
  // Post-grasp the grasp frame rides rigidly on the palm, so candidate palm
  // poses map to candidate object poses through the current relative
  // transform.
  const bool carrying = s.phase.grasped;
  const Pose grasp_in_palm =
      compose(inverse(s.frames.hand_palm), s.frames.object_grasp);
  auto objective = [&](const Pose& palm) {
    if (!carrying) return metric(palm, s.frames.object_grasp);
    return metric(compose(palm, grasp_in_palm), s.frames.home);
  };

  const double step_size = cfg.descent_gain * cfg.probe_step;
  const double f0 = objective(s.frames.hand_palm);
  auto eval = [&](const Eigen::Vector3d& dt, const Eigen::Vector3d& de) {
    return objective(integrate_pose(s.frames.hand_palm, dt, de));
  };

  // Probe each pose dimension at three step scales and keep the best signed
  // move when it improves; the finer scales push the convergence floor well
  // under the contact-pad alignment tolerance. Joint moves cannot change
  // the objective, so the tie rule zeroes them without probing.
  const double scales[3] = {step_size, step_size / 4.0, step_size / 16.0};
  Eigen::Matrix<double, 6, 1> move = Eigen::Matrix<double, 6, 1>::Zero();
  double best_single = f0;
  Eigen::Matrix<double, 6, 1> best_single_move =
      Eigen::Matrix<double, 6, 1>::Zero();
  for (int i = 0; i < 6; ++i) {
    double fi = f0;
    for (double scale : scales) {
      for (double sign : {1.0, -1.0}) {
        Eigen::Matrix<double, 6, 1> d = Eigen::Matrix<double, 6, 1>::Zero();
        d[i] = sign * scale;
        const double f = eval(d.head<3>(), d.tail<3>());
        if (f < fi) {
          fi = f;
          move[i] = d[i];
        }
      }
    }
    if (fi < best_single) {
      best_single = fi;
      best_single_move.setZero();
      best_single_move[i] = move[i];
    }
  }

  // Guard: apply the combined move only if it actually beats the best
  // single-axis move; fall back to that, then to standing still.
  Eigen::Matrix<double, 6, 1> chosen = Eigen::Matrix<double, 6, 1>::Zero();
  if (!move.isZero()) {
    const double f_comb = eval(move.head<3>(), move.tail<3>());
    if (f_comb < best_single) {
      chosen = move;
    } else if (best_single < f0) {
      chosen = best_single_move;
    }
  } else if (best_single < f0) {
    chosen = best_single_move;
  }

  Action a;
  a.d_translation = chosen.head<3>();
  a.d_euler = chosen.tail<3>();
  if (s.contacts.count() > 0 || carrying) {
    a.d_joints = Eigen::Vector3d::Constant(cfg.joint_close_rate);
  }
  return a;
}

Action LinearPolicy::act(const Observation& obs) const {
  const Eigen::Matrix<double, 9, 1> out = weight * obs.flatten() + bias;
  Action a;
  a.d_translation = out.segment<3>(0);
  a.d_euler = out.segment<3>(3);
  a.d_joints = out.segment<3>(6);
  return a;
}

void LinearPolicy::validate() const {
  if (!weight.allFinite() || !bias.allFinite()) {
    throw std::invalid_argument("LinearPolicy: non-finite entries");
  }
}

void LinearPolicy::save(std::ostream& os) const {
  os << weight.rows() << ' ' << weight.cols() << '\n';
  os.precision(17);
  for (int r = 0; r < weight.rows(); ++r) {
    for (int c = 0; c < weight.cols(); ++c) {
      os << (c ? " " : "") << weight(r, c);
    }
    os << '\n';
  }
  for (int r = 0; r < bias.rows(); ++r) {
    os << (r ? " " : "") << bias(r);
  }
  os << '\n';
}

LinearPolicy LinearPolicy::load(std::istream& is) {
  int rows = 0, cols = 0;
  is >> rows >> cols;
  if (!is || rows != 9 || cols != Observation::kDim) {
    throw std::invalid_argument("LinearPolicy::load: bad header");
  }
  LinearPolicy p;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      is >> p.weight(r, c);
    }
  }
  for (int r = 0; r < 9; ++r) is >> p.bias(r);
  if (!is) {
    throw std::invalid_argument("LinearPolicy::load: truncated data");
  }
  p.validate();
  return p;
}

ControllerFn make_greedy(const ControllerConfig& cfg) {
  return [cfg](const SimState& s, const Observation&) {
    return greedy_step(s, cfg);
  };
}

ControllerFn make_policy(const LinearPolicy& policy) {
  policy.validate();
  return [policy](const SimState&, const Observation& obs) {
    return policy.act(obs);
  };
}

double wilson_center_half(int successes, int n, bool upper) {
  if (n <= 0) return upper ? 1.0 : 0.0;
  const double z = 1.959963984540054;  // 97.5th normal percentile
  const double p = static_cast<double>(successes) / n;
  const double z2n = z * z / n;
  const double center = (p + z2n / 2.0) / (1.0 + z2n);
  const double half =
      z / (1.0 + z2n) * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n));
  return upper ? std::min(1.0, center + half) : std::max(0.0, center - half);
}

double wilson_lower(int successes, int n) {
  return wilson_center_half(successes, n, false);
}

double wilson_upper(int successes, int n) {
  return wilson_center_half(successes, n, true);
}

RolloutResult rollout(const ControllerFn& controller, const SimConfig& cfg,
                      std::span<const std::uint64_t> seeds) {
  RolloutResult out;
  std::vector<double> returns, final_dt, final_dr, initial_dr;
  for (std::uint64_t seed : seeds) {
    SimState s = reset(cfg, seed);
    EpisodeLog log;
    log.seed = seed;
    log.target_tolerance = cfg.reward.target_tolerance;
    log.max_steps = cfg.max_steps;
    log.fall_window = cfg.fall_window;
    Observation obs = observe(s, cfg);
    std::vector<double> rewards;
    while (!s.done) {
      const Action a = controller(s, obs);
      StepOutput so = step(s, a, cfg);
      if (log.grasp_step < 0 && so.record.grasped) {
        log.grasp_step = so.record.step;
      }
      log.steps.push_back(so.record);
      rewards.push_back(so.reward);
      obs = so.obs;
    }
    log.outcome = s.outcome;
    log.discounted = discounted_return(rewards, cfg.reward.gamma);
    returns.push_back(log.discounted);
    initial_dr.push_back(log.steps.front().d_rot);
    final_dt.push_back(log.steps.back().d_trans);
    final_dr.push_back(log.steps.back().d_rot);
    switch (s.outcome) {
      case Outcome::kSuccess:
        out.summary.successes += 1;
        break;
      case Outcome::kFail:
        out.summary.fails += 1;
        break;
      default:
        out.summary.timeouts += 1;
        break;
    }
    out.logs.push_back(std::move(log));
  }
  out.summary.episodes = static_cast<int>(out.logs.size());
  if (out.summary.episodes > 0) {
    out.summary.success_rate =
        static_cast<double>(out.summary.successes) / out.summary.episodes;
  }
  out.summary.wilson_lo =
      wilson_lower(out.summary.successes, out.summary.episodes);
  out.summary.wilson_hi =
      wilson_upper(out.summary.successes, out.summary.episodes);
  out.summary.mean_return = mean(returns);
  out.summary.mean_final_d_trans = mean(final_dt);
  out.summary.mean_final_d_rot = mean(final_dr);
  out.summary.mean_initial_d_rot = mean(initial_dr);
  return out;
}

namespace {

void mask_translation_only(LinearPolicy& p) {
  p.weight.bottomRows<6>().setZero();
  p.bias.tail<6>().setZero();
}

double score_policy(const LinearPolicy& p, const SimConfig& cfg,
                    std::span<const std::uint64_t> seeds) {
  return rollout(make_policy(p), cfg, seeds).summary.mean_return;
}

}  // namespace

SearchResult random_search(const LinearPolicy& init, const SearchConfig& sc,
                           const SimConfig& cfg) {
  if (sc.iterations < 0 || sc.population < 1) {
    throw std::invalid_argument(
        "random_search: iterations must be >= 0 and population >= 1");
  }
  if (sc.noise_scale < 0.0) {
    throw std::invalid_argument("random_search: noise_scale must be >= 0");
  }
  if (sc.eval_seeds.empty()) {
    throw std::invalid_argument("random_search: eval_seeds must be non-empty");
  }
  SearchResult out;
  out.best = init;
  if (sc.translation_only) mask_translation_only(out.best);
  out.best.validate();
  out.initial_score = score_policy(out.best, cfg, sc.eval_seeds);
  double best_score = out.initial_score;
  Rng rng(sc.seed);
  for (int it = 0; it < sc.iterations; ++it) {
    for (int k = 0; k < sc.population; ++k) {
      LinearPolicy cand = out.best;
      for (int r = 0; r < cand.weight.rows(); ++r) {
        for (int c = 0; c < cand.weight.cols(); ++c) {
          cand.weight(r, c) += sc.noise_scale * rng.normal();
        }
      }
      for (int r = 0; r < cand.bias.rows(); ++r) {
        cand.bias(r) += sc.noise_scale * rng.normal();
      }
      if (sc.translation_only) mask_translation_only(cand);
      const double score = score_policy(cand, cfg, sc.eval_seeds);
      if (score > best_score) {
        best_score = score;
        out.best = cand;
      }
    }
    out.incumbent_scores.push_back(best_score);
  }
  return out;
}

LinearPolicy random_search(const LinearPolicy& init, int iterations,
                           int population, double noise_scale,
                           const SimConfig& cfg) {
  SearchConfig sc;
  sc.iterations = iterations;
  sc.population = population;
  sc.noise_scale = noise_scale;
  sc.seed = cfg.seed;
  for (std::uint64_t i = 0; i < 8; ++i) {
    sc.eval_seeds.push_back(episode_seed(cfg.seed, 0, i));
  }
  return random_search(init, sc, cfg).best;
}

}  // namespace handover
