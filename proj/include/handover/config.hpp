#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "handover/controller.hpp"
#include "handover/sim.hpp"

namespace handover {

// Configuration mistakes (unreadable file, unknown key, bad value). The CLI
// maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raw `key = value` file with [section] headers, '#' comments and blank
// lines. Keys are stored fully qualified as "section.key".
struct RawConfig {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry> entries;

  static RawConfig parse(std::istream& is, const std::string& origin);
  static RawConfig parse_file(const std::string& path);

  // Applies an override of the form "section.key=value" or, when the bare
  // key is unique in the schema, "key=value".
  void apply_override(const std::string& assignment);
};

// Every tunable parameter, with defaults. The schema (section, key, type)
// is fixed; unknown keys in a config file are a hard error.
struct AppConfig {
  // [run]
  std::string controller = "greedy";  // greedy | policy
  std::string metric = "dq";          // dq | euler | matrix
  int episodes = 10;
  std::uint64_t seed = 0;
  std::string policy_path;  // required when controller = policy

  // [sim]
  std::string object_name = "prism";
  std::string perturbation = "off";  // off | on
  int max_steps = 500;
  double reset_cube_half_extent = 0.15;
  double reset_rot_roll_yaw = 0.3;
  double reset_rot_pitch = 0.6;
  double action_translation_limit = 0.01;
  double action_rotation_limit = 0.05;
  double joint_limit = 0.05;
  double perturb_linear_speed = 0.03;
  double perturb_angular_speed = 0.16;
  double control_dt = 1.0 / 30.0;
  int fall_window = 15;
  double contact_epsilon = 0.01;
  Eigen::Vector3d joint_thresholds{0.3, 0.6, 0.9};
  double joint_max = 1.6;
  double obs_noise_std = 0.0;
  Eigen::Vector3d nominal_grasp{0.55, 0.0, 0.5};
  Eigen::Vector3d home_position{0.0, 0.0, 0.5};

  // [reward]
  double eta0 = 1.0;
  double alpha = 12.0;
  double grasp_bonus = 5.0;
  double target_bonus = 10.0;
  double target_tolerance = 0.05;
  double gamma = 0.99;
  bool maneuver_translation_only = false;
  double psi = 2.1;
  double mu = 0.32;
  double beta = 0.32;

  // [controller]
  double probe_step = 0.005;
  double descent_gain = 2.0;
  double joint_close_rate = 0.05;

  // [sweep]
  std::vector<std::string> sweep_metrics{"dq", "euler", "matrix"};
  std::vector<std::string> sweep_objects{"prism", "short_prism", "cylinder",
                                         "short_cylinder"};
  std::vector<std::string> sweep_perturbations{"off", "on"};

  // [optimize]
  int opt_iterations = 200;
  int opt_population = 32;
  double opt_noise_scale = 0.05;
  bool opt_translation_only = true;
  int opt_eval_episodes = 8;

  // Defaults overlaid with the raw entries; throws ConfigError on unknown
  // keys or unparsable values, naming the key and line.
  static AppConfig from(const RawConfig& raw);

  // Canonical resolved-config text: full schema, fixed order, values
  // formatted so that parse(echo(cfg)) == cfg exactly.
  void echo(std::ostream& os) const;

  // Materialized module configs (validated on use, not here).
  SimConfig sim_config() const;
  ControllerConfig controller_config() const;
};

}  // namespace handover
