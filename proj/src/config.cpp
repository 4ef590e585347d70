#include "handover/config.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace handover {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_vec3(const Eigen::Vector3d& v) {
  return fmt_g17(v.x()) + " " + fmt_g17(v.y()) + " " + fmt_g17(v.z());
}

std::string fmt_list(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            int line, const std::string& expected) {
  throw ConfigError("bad value '" + value + "' for " + key +
                    (line > 0 ? " (line " + std::to_string(line) + ")" : "") +
                    ": expected " + expected);
}

double parse_double(const std::string& key, const std::string& v, int line) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing chars");
    return d;
  } catch (const std::exception&) {
    bad_value(key, v, line, "a real number");
  }
}

int parse_int(const std::string& key, const std::string& v, int line) {
  try {
    size_t pos = 0;
    const long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing chars");
    return static_cast<int>(n);
  } catch (const std::exception&) {
    bad_value(key, v, line, "an integer");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v,
                        int line) {
  try {
    size_t pos = 0;
    const unsigned long long n = std::stoull(v, &pos);
    if (pos != v.size() || v.front() == '-') {
      throw std::invalid_argument("trailing chars");
    }
    return n;
  } catch (const std::exception&) {
    bad_value(key, v, line, "an unsigned integer");
  }
}

bool parse_bool(const std::string& key, const std::string& v, int line) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad_value(key, v, line, "true or false");
}

Eigen::Vector3d parse_vec3(const std::string& key, const std::string& v,
                           int line) {
  std::istringstream is(v);
  Eigen::Vector3d out;
  if (!(is >> out.x() >> out.y() >> out.z()) || !(is >> std::ws).eof()) {
    bad_value(key, v, line, "three space-separated reals");
  }
  return out;
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void check_choice(const std::string& key, const std::string& v, int line,
                  const std::vector<std::string>& allowed) {
  for (const auto& a : allowed) {
    if (v == a) return;
  }
  bad_value(key, v, line, "one of " + fmt_list(allowed));
}

struct Field {
  const char* section;
  const char* key;
  std::function<void(AppConfig&, const std::string& value, int line)> set;
  std::function<std::string(const AppConfig&)> get;
};

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    auto add_double = [&](const char* sec, const char* key,
                          double AppConfig::* m) {
      f.push_back({sec, key,
                   [key, m](AppConfig& c, const std::string& v, int line) {
                     c.*m = parse_double(key, v, line);
                   },
                   [m](const AppConfig& c) { return fmt_g17(c.*m); }});
    };
    auto add_int = [&](const char* sec, const char* key, int AppConfig::* m) {
      f.push_back({sec, key,
                   [key, m](AppConfig& c, const std::string& v, int line) {
                     c.*m = parse_int(key, v, line);
                   },
                   [m](const AppConfig& c) { return std::to_string(c.*m); }});
    };
    auto add_bool = [&](const char* sec, const char* key,
                        bool AppConfig::* m) {
      f.push_back({sec, key,
                   [key, m](AppConfig& c, const std::string& v, int line) {
                     c.*m = parse_bool(key, v, line);
                   },
                   [m](const AppConfig& c) {
                     return std::string(c.*m ? "true" : "false");
                   }});
    };
    auto add_vec3 = [&](const char* sec, const char* key,
                        Eigen::Vector3d AppConfig::* m) {
      f.push_back({sec, key,
                   [key, m](AppConfig& c, const std::string& v, int line) {
                     c.*m = parse_vec3(key, v, line);
                   },
                   [m](const AppConfig& c) { return fmt_vec3(c.*m); }});
    };
    auto add_string = [&](const char* sec, const char* key,
                          std::string AppConfig::* m,
                          std::vector<std::string> allowed = {}) {
      f.push_back({sec, key,
                   [key, m, allowed](AppConfig& c, const std::string& v,
                                     int line) {
                     if (!allowed.empty()) check_choice(key, v, line, allowed);
                     c.*m = v;
                   },
                   [m](const AppConfig& c) { return c.*m; }});
    };
    auto add_list = [&](const char* sec, const char* key,
                        std::vector<std::string> AppConfig::* m,
                        std::vector<std::string> allowed) {
      f.push_back({sec, key,
                   [key, m, allowed](AppConfig& c, const std::string& v,
                                     int line) {
                     auto items = parse_list(v);
                     if (items.empty()) bad_value(key, v, line, "a list");
                     for (const auto& it : items) {
                       check_choice(key, it, line, allowed);
                     }
                     c.*m = items;
                   },
                   [m](const AppConfig& c) { return fmt_list(c.*m); }});
    };

    add_string("run", "controller", &AppConfig::controller,
               {"greedy", "policy"});
    add_string("run", "metric", &AppConfig::metric, {"dq", "euler", "matrix"});
    add_int("run", "episodes", &AppConfig::episodes);
    f.push_back({"run", "seed",
                 [](AppConfig& c, const std::string& v, int line) {
                   c.seed = parse_u64("seed", v, line);
                 },
                 [](const AppConfig& c) { return std::to_string(c.seed); }});
    add_string("run", "policy_path", &AppConfig::policy_path);

    add_string("sim", "object", &AppConfig::object_name,
               {"prism", "short_prism", "cylinder", "short_cylinder"});
    add_string("sim", "perturbation", &AppConfig::perturbation, {"off", "on"});
    add_int("sim", "max_steps", &AppConfig::max_steps);
    add_double("sim", "reset_cube_half_extent",
               &AppConfig::reset_cube_half_extent);
    add_double("sim", "reset_rot_roll_yaw", &AppConfig::reset_rot_roll_yaw);
    add_double("sim", "reset_rot_pitch", &AppConfig::reset_rot_pitch);
    add_double("sim", "action_translation_limit",
               &AppConfig::action_translation_limit);
    add_double("sim", "action_rotation_limit",
               &AppConfig::action_rotation_limit);
    add_double("sim", "joint_limit", &AppConfig::joint_limit);
    add_double("sim", "perturb_linear_speed",
               &AppConfig::perturb_linear_speed);
    add_double("sim", "perturb_angular_speed",
               &AppConfig::perturb_angular_speed);
    add_double("sim", "control_dt", &AppConfig::control_dt);
    add_int("sim", "fall_window", &AppConfig::fall_window);
    add_double("sim", "contact_epsilon", &AppConfig::contact_epsilon);
    add_vec3("sim", "joint_thresholds", &AppConfig::joint_thresholds);
    add_double("sim", "joint_max", &AppConfig::joint_max);
    add_double("sim", "obs_noise_std", &AppConfig::obs_noise_std);
    add_vec3("sim", "nominal_grasp", &AppConfig::nominal_grasp);
    add_vec3("sim", "home_position", &AppConfig::home_position);

    add_double("reward", "eta0", &AppConfig::eta0);
    add_double("reward", "alpha", &AppConfig::alpha);
    add_double("reward", "grasp_bonus", &AppConfig::grasp_bonus);
    add_double("reward", "target_bonus", &AppConfig::target_bonus);
    add_double("reward", "target_tolerance", &AppConfig::target_tolerance);
    add_double("reward", "gamma", &AppConfig::gamma);
    add_bool("reward", "maneuver_translation_only",
             &AppConfig::maneuver_translation_only);
    add_double("reward", "psi", &AppConfig::psi);
    add_double("reward", "mu", &AppConfig::mu);
    add_double("reward", "beta", &AppConfig::beta);

    add_double("controller", "probe_step", &AppConfig::probe_step);
    add_double("controller", "descent_gain", &AppConfig::descent_gain);
    add_double("controller", "joint_close_rate",
               &AppConfig::joint_close_rate);

    add_list("sweep", "metrics", &AppConfig::sweep_metrics,
             {"dq", "euler", "matrix"});
    add_list("sweep", "objects", &AppConfig::sweep_objects,
             {"prism", "short_prism", "cylinder", "short_cylinder"});
    add_list("sweep", "perturbations", &AppConfig::sweep_perturbations,
             {"off", "on"});

    add_int("optimize", "iterations", &AppConfig::opt_iterations);
    add_int("optimize", "population", &AppConfig::opt_population);
    add_double("optimize", "noise_scale", &AppConfig::opt_noise_scale);
    add_bool("optimize", "translation_only",
             &AppConfig::opt_translation_only);
    add_int("optimize", "eval_episodes", &AppConfig::opt_eval_episodes);
    return f;
  }();
  return fields;
}

const Field* find_field(const std::string& dotted) {
  for (const Field& f : schema()) {
    if (dotted == std::string(f.section) + "." + f.key) return &f;
  }
  return nullptr;
}

}  // namespace

RawConfig RawConfig::parse(std::istream& is, const std::string& origin) {
  RawConfig out;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": malformed section header '" + line + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": empty section name");
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": empty key");
    }
    if (section.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key '" +
                        key + "' outside any [section]");
    }
    out.entries[section + "." + key] = {value, lineno};
  }
  return out;
}

RawConfig RawConfig::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return parse(is, path);
}

void RawConfig::apply_override(const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment +
                      "' is not of the form key=value");
  }
  std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.find('.') == std::string::npos) {
    // Bare key: accept it when unique across the schema.
    const Field* match = nullptr;
    for (const Field& f : schema()) {
      if (key == f.key) {
        if (match) {
          throw ConfigError("override key '" + key +
                            "' is ambiguous; qualify it as section.key");
        }
        match = &f;
      }
    }
    if (!match) {
      throw ConfigError("unknown override key '" + key + "'");
    }
    key = std::string(match->section) + "." + match->key;
  }
  entries[key] = {value, 0};
}

AppConfig AppConfig::from(const RawConfig& raw) {
  AppConfig cfg;
  for (const auto& [dotted, entry] : raw.entries) {
    const Field* field = find_field(dotted);
    if (!field) {
      throw ConfigError(
          "unknown config key '" + dotted + "'" +
          (entry.line > 0 ? " (line " + std::to_string(entry.line) + ")"
                          : ""));
    }
    field->set(cfg, entry.value, entry.line);
  }
  if (cfg.episodes < 1) {
    throw ConfigError("run.episodes must be >= 1");
  }
  if (cfg.controller == "policy" && cfg.policy_path.empty()) {
    throw ConfigError("run.policy_path is required when controller = policy");
  }
  if (cfg.opt_iterations < 0 || cfg.opt_population < 1 ||
      cfg.opt_eval_episodes < 1) {
    throw ConfigError(
        "optimize.iterations must be >= 0, population and eval_episodes "
        ">= 1");
  }
  return cfg;
}

void AppConfig::echo(std::ostream& os) const {
  const char* current = "";
  for (const Field& f : schema()) {
    if (std::string(current) != f.section) {
      if (*current) os << '\n';
      os << '[' << f.section << "]\n";
      current = f.section;
    }
    os << f.key << " = " << f.get(*this) << '\n';
  }
}

SimConfig AppConfig::sim_config() const {
  SimConfig s;
  s.reset_cube_half_extent = reset_cube_half_extent;
  s.reset_rot_roll_yaw = reset_rot_roll_yaw;
  s.reset_rot_pitch = reset_rot_pitch;
  s.max_steps = max_steps;
  s.action_translation_limit = action_translation_limit;
  s.action_rotation_limit = action_rotation_limit;
  s.joint_limit = joint_limit;
  s.perturbation = perturbation == "on";
  s.perturb_linear_speed = perturb_linear_speed;
  s.perturb_angular_speed = perturb_angular_speed;
  s.control_dt = control_dt;
  s.fall_window = fall_window;
  s.contact_epsilon = contact_epsilon;
  s.joint_thresholds = joint_thresholds;
  s.joint_max = joint_max;
  s.obs_noise_std = obs_noise_std;
  s.home = Pose{home_position, Quaternion::identity()};
  s.nominal_grasp = nominal_grasp;
  s.object = ObjectSpec::by_name(object_name);
  s.seed = seed;
  s.reward.metric = metric_from_string(metric);
  s.reward.weights = MetricWeights{psi, mu, beta};
  s.reward.eta0 = eta0;
  s.reward.alpha = alpha;
  s.reward.grasp_bonus = grasp_bonus;
  s.reward.target_bonus = target_bonus;
  s.reward.target_tolerance = target_tolerance;
  s.reward.maneuver_translation_only = maneuver_translation_only;
  s.reward.gamma = gamma;
  return s;
}

ControllerConfig AppConfig::controller_config() const {
  ControllerConfig c;
  c.metric = metric_from_string(metric);
  c.weights = MetricWeights{psi, mu, beta};
  c.probe_step = probe_step;
  c.descent_gain = descent_gain;
  c.joint_close_rate = joint_close_rate;
  return c;
}

}  // namespace handover
