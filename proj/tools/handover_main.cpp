#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "handover/config.hpp"
#include "handover/controller.hpp"
#include "handover/sim.hpp"

namespace {

using handover::AppConfig;
using handover::ConfigError;
using handover::ControllerFn;
using handover::EpisodeLog;
using handover::LinearPolicy;
using handover::RawConfig;
using handover::RolloutResult;
using handover::SimConfig;
using json = nlohmann::ordered_json;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path,
                  "key = value config file (optional; defaults apply)");
  cmd->add_option("-o,--out", args.out_dir, "output directory")->required();
  cmd->add_option("--set", args.overrides,
                  "config override, section.key=value or unique key=value");
  cmd->add_option("--episodes", args.episodes, "shorthand for run.episodes");
  cmd->add_option("--seed", args.seed, "shorthand for run.seed");
}

AppConfig load_config(const CommonArgs& args) {
  RawConfig raw;
  if (!args.config_path.empty()) {
    raw = RawConfig::parse_file(args.config_path);
  }
  for (const std::string& o : args.overrides) {
    raw.apply_override(o);
  }
  if (args.episodes) {
    raw.apply_override("run.episodes=" + std::to_string(*args.episodes));
  }
  if (args.seed) {
    raw.apply_override("run.seed=" + std::to_string(*args.seed));
  }
  return AppConfig::from(raw);
}

std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot write '" + p.string() + "'");
  }
  return os;
}

void write_resolved(const AppConfig& cfg, const std::filesystem::path& dir) {
  auto os = open_output(dir / "resolved.cfg");
  cfg.echo(os);
}

ControllerFn build_controller(const AppConfig& cfg, const SimConfig& sim) {
  if (cfg.controller == "greedy") {
    handover::ControllerConfig cc = cfg.controller_config();
    cc.validate(sim);
    return handover::make_greedy(cc);
  }
  std::ifstream is(cfg.policy_path);
  if (!is) {
    throw ConfigError("cannot open policy file '" + cfg.policy_path + "'");
  }
  return handover::make_policy(LinearPolicy::load(is));
}

std::vector<std::uint64_t> cell_episode_seeds(std::uint64_t base,
                                              std::uint64_t cell,
                                              int episodes) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(episodes);
  for (int i = 0; i < episodes; ++i) {
    seeds.push_back(handover::episode_seed(base, cell, i));
  }
  return seeds;
}

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * fraction);
  return buf;
}

json cell_json(const std::string& metric, const std::string& object,
               const std::string& perturbation,
               const handover::RolloutSummary& s, std::uint64_t seed) {
  json j;
  j["metric"] = metric;
  j["object"] = object;
  j["perturbation"] = perturbation;
  j["succ_pct"] = 100.0 * s.successes / s.episodes;
  j["fail_pct"] = 100.0 * s.fails / s.episodes;
  j["timeout_pct"] = 100.0 * s.timeouts / s.episodes;
  j["mean_return"] = s.mean_return;
  j["episodes"] = s.episodes;
  j["seed"] = seed;
  return j;
}

void write_episode_file(const std::filesystem::path& dir, const char* prefix,
                        int index, const EpisodeLog& log) {
  char name[64];
  std::snprintf(name, sizeof(name), "%s_%04d.csv", prefix, index);
  auto os = open_output(dir / name);
  handover::write_episode_csv(os, log);
}

int cmd_run(const AppConfig& cfg, const std::filesystem::path& out) {
  SimConfig sim = cfg.sim_config();
  sim.validate();
  const ControllerFn controller = build_controller(cfg, sim);
  const auto seeds = cell_episode_seeds(cfg.seed, 0, cfg.episodes);
  const RolloutResult rr = handover::rollout(controller, sim, seeds);

  std::filesystem::create_directories(out);
  for (size_t i = 0; i < rr.logs.size(); ++i) {
    write_episode_file(out, "episode", static_cast<int>(i), rr.logs[i]);
  }

  json summary = cell_json(cfg.metric, cfg.object_name, cfg.perturbation,
                           rr.summary, cfg.seed);
  summary["mean_final_d_trans"] = rr.summary.mean_final_d_trans;
  summary["mean_final_d_rot"] = rr.summary.mean_final_d_rot;
  summary["wilson_lo"] = rr.summary.wilson_lo;
  summary["wilson_hi"] = rr.summary.wilson_hi;
  {
    auto os = open_output(out / "summary.json");
    os << json::array({summary}).dump(2) << '\n';
  }
  {
    auto os = open_output(out / "summary.txt");
    char line[256];
    std::snprintf(line, sizeof(line), "%-7s %-15s %-8s %9s %9s %9s %12s\n",
                  "metric", "object", "perturb", "succ%", "fail%", "tmout%",
                  "mean_ret");
    os << line;
    std::snprintf(line, sizeof(line),
                  "%-7s %-15s %-8s %9s %9s %9s %12.4f\n", cfg.metric.c_str(),
                  cfg.object_name.c_str(), cfg.perturbation.c_str(),
                  pct(rr.summary.success_rate).c_str(),
                  pct(static_cast<double>(rr.summary.fails) /
                      rr.summary.episodes)
                      .c_str(),
                  pct(static_cast<double>(rr.summary.timeouts) /
                      rr.summary.episodes)
                      .c_str(),
                  rr.summary.mean_return);
    os << line;
  }
  write_resolved(cfg, out);
  std::cout << "run: " << rr.summary.episodes << " episodes, "
            << pct(rr.summary.success_rate) << "% success, mean return "
            << rr.summary.mean_return << '\n';
  return 0;
}

int cmd_sweep(const AppConfig& cfg, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  json cells = json::array();
  std::vector<std::string> table;
  std::uint64_t cell_index = 0;
  for (const std::string& metric : cfg.sweep_metrics) {
    for (const std::string& object : cfg.sweep_objects) {
      for (const std::string& perturbation : cfg.sweep_perturbations) {
        AppConfig cell_cfg = cfg;
        cell_cfg.metric = metric;
        cell_cfg.object_name = object;
        cell_cfg.perturbation = perturbation;
        SimConfig sim = cell_cfg.sim_config();
        sim.validate();
        const ControllerFn controller = build_controller(cell_cfg, sim);
        const std::uint64_t cell_seed =
            handover::mix64(cfg.seed + handover::mix64(cell_index));
        const auto seeds =
            cell_episode_seeds(cfg.seed, cell_index, cfg.episodes);
        const RolloutResult rr = handover::rollout(controller, sim, seeds);
        cells.push_back(
            cell_json(metric, object, perturbation, rr.summary, cell_seed));

        char lin[16] = "-";
        char ang[16] = "-";
        if (perturbation == "on") {
          std::snprintf(lin, sizeof(lin), "%g", cfg.perturb_linear_speed);
          std::snprintf(ang, sizeof(ang), "%g", cfg.perturb_angular_speed);
        }
        char line[320];
        std::snprintf(line, sizeof(line),
                      "%-7s %-15s %-8s %8s %9s %9s %9s %9s %12.4f %20" PRIu64
                      "\n",
                      metric.c_str(), object.c_str(), perturbation.c_str(),
                      lin, ang, pct(rr.summary.success_rate).c_str(),
                      pct(static_cast<double>(rr.summary.fails) /
                          rr.summary.episodes)
                          .c_str(),
                      pct(static_cast<double>(rr.summary.timeouts) /
                          rr.summary.episodes)
                          .c_str(),
                      rr.summary.mean_return, cell_seed);
        table.push_back(line);
        ++cell_index;
      }
    }
  }
  {
    auto os = open_output(out / "sweep.json");
    os << cells.dump(2) << '\n';
  }
  {
    auto os = open_output(out / "sweep.txt");
    char header[320];
    std::snprintf(header, sizeof(header),
                  "%-7s %-15s %-8s %8s %9s %9s %9s %9s %12s %20s\n", "metric",
                  "object", "perturb", "lin_mps", "ang_rps", "succ%", "fail%",
                  "tmout%", "mean_ret", "seed");
    os << header;
    for (const std::string& line : table) os << line;
  }
  write_resolved(cfg, out);
  std::cout << "sweep: " << cells.size() << " cells x " << cfg.episodes
            << " episodes\n";
  return 0;
}

int cmd_trace(const AppConfig& cfg, const std::filesystem::path& out) {
  SimConfig sim = cfg.sim_config();
  sim.validate();
  const ControllerFn controller = build_controller(cfg, sim);
  const auto seeds = cell_episode_seeds(cfg.seed, 0, cfg.episodes);
  const RolloutResult rr = handover::rollout(controller, sim, seeds);

  std::filesystem::create_directories(out);
  char buf[64];
  for (size_t i = 0; i < rr.logs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "trace_%04d.csv", static_cast<int>(i));
    auto os = open_output(out / buf);
    os << "step,d_global,d_trans,d_rot\n";
    for (const auto& rec : rr.logs[i].steps) {
      char line[160];
      std::snprintf(line, sizeof(line), "%d,%.12g,%.12g,%.12g\n", rec.step,
                    rec.d_global, rec.d_trans, rec.d_rot);
      os << line;
    }
  }

  // Mean curve over successful episodes; shorter episodes hold their final
  // value so every row averages the same number of episodes.
  std::vector<const EpisodeLog*> succ;
  size_t max_len = 0;
  for (const auto& log : rr.logs) {
    if (log.outcome == handover::Outcome::kSuccess) {
      succ.push_back(&log);
      max_len = std::max(max_len, log.steps.size());
    }
  }
  {
    auto os = open_output(out / "trace_mean.csv");
    os << "step,d_global,d_trans,d_rot\n";
    for (size_t r = 0; r < max_len; ++r) {
      double g = 0, t = 0, rot = 0;
      for (const EpisodeLog* log : succ) {
        const auto& rec =
            r < log->steps.size() ? log->steps[r] : log->steps.back();
        g += rec.d_global;
        t += rec.d_trans;
        rot += rec.d_rot;
      }
      const double n = static_cast<double>(succ.size());
      char line[160];
      std::snprintf(line, sizeof(line), "%zu,%.12g,%.12g,%.12g\n", r, g / n,
                    t / n, rot / n);
      os << line;
    }
  }
  write_resolved(cfg, out);
  std::cout << "trace: " << rr.logs.size() << " episodes, " << succ.size()
            << " successes\n";
  return 0;
}

int cmd_optimize(const AppConfig& cfg, const std::filesystem::path& out) {
  SimConfig sim = cfg.sim_config();
  sim.validate();
  handover::SearchConfig sc;
  sc.iterations = cfg.opt_iterations;
  sc.population = cfg.opt_population;
  sc.noise_scale = cfg.opt_noise_scale;
  sc.translation_only = cfg.opt_translation_only;
  sc.seed = cfg.seed;
  sc.eval_seeds = cell_episode_seeds(cfg.seed, 0, cfg.opt_eval_episodes);
  const handover::SearchResult res =
      handover::random_search(LinearPolicy{}, sc, sim);

  std::filesystem::create_directories(out);
  {
    auto os = open_output(out / "policy.txt");
    res.best.save(os);
  }
  {
    auto os = open_output(out / "scores.csv");
    os << "iteration,score\n";
    char line[96];
    std::snprintf(line, sizeof(line), "0,%.12g\n", res.initial_score);
    os << line;
    for (size_t i = 0; i < res.incumbent_scores.size(); ++i) {
      std::snprintf(line, sizeof(line), "%zu,%.12g\n", i + 1,
                    res.incumbent_scores[i]);
      os << line;
    }
  }
  write_resolved(cfg, out);
  const double final_score = res.incumbent_scores.empty()
                                 ? res.initial_score
                                 : res.incumbent_scores.back();
  std::cout << "optimize: score " << res.initial_score << " -> "
            << final_score << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinematic handover simulation harness"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, trace_args, opt_args;
  CLI::App* run = app.add_subcommand("run", "roll out episodes, log CSVs");
  add_common(run, run_args);
  CLI::App* sweep =
      app.add_subcommand("sweep", "metric x object x perturbation grid");
  add_common(sweep, sweep_args);
  CLI::App* trace =
      app.add_subcommand("trace", "per-step distance curves per episode");
  add_common(trace, trace_args);
  CLI::App* optimize =
      app.add_subcommand("optimize", "random-search a linear policy");
  add_common(optimize, opt_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      return cmd_run(load_config(run_args), run_args.out_dir);
    }
    if (sweep->parsed()) {
      return cmd_sweep(load_config(sweep_args), sweep_args.out_dir);
    }
    if (trace->parsed()) {
      return cmd_trace(load_config(trace_args), trace_args.out_dir);
    }
    return cmd_optimize(load_config(opt_args), opt_args.out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 3;
  }
}
