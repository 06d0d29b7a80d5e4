#include "movebench/config.h"

#include <cstdlib>
#include <functional>
#include <sstream>
#include <vector>

#include "movebench/io.h"

namespace movebench {
namespace {

struct Entry {
  const char* key;
  std::function<std::string(const AppConfig&)> get;
  std::function<void(AppConfig&, const std::string&, const std::string&)> set;
};

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double x = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("config: '" + key + "' needs a number, got '" + value +
                      "'");
  }
  return x;
}

long to_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long x = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0') {
    throw ConfigError("config: '" + key + "' needs an integer, got '" + value +
                      "'");
  }
  return x;
}

template <typename T>
Entry dbl(const char* key, T double_field) {
  return {key,
          [double_field](const AppConfig& c) {
            return format_g9(std::invoke(double_field, c));
          },
          [double_field](AppConfig& c, const std::string& k,
                         const std::string& v) {
            std::invoke(double_field, c) = to_double(k, v);
          }};
}

template <typename T>
Entry integer(const char* key, T int_field) {
  return {key,
          [int_field](const AppConfig& c) {
            return std::to_string(std::invoke(int_field, c));
          },
          [int_field](AppConfig& c, const std::string& k,
                      const std::string& v) {
            std::invoke(int_field, c) =
                static_cast<std::remove_reference_t<decltype(std::invoke(
                    int_field, c))>>(to_int(k, v));
          }};
}

std::string hidden_to_string(const std::vector<int>& hidden) {
  std::string s;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(hidden[i]);
  }
  return s;
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> r;
    r.push_back(dbl("world.workspace_half",
                    [](auto& c) -> auto& { return c.world.workspace_half; }));
    r.push_back(dbl("world.dt", [](auto& c) -> auto& { return c.world.dt; }));
    r.push_back(integer("world.step_limit",
                        [](auto& c) -> auto& { return c.world.step_limit; }));
    r.push_back(dbl("world.grasp_radius",
                    [](auto& c) -> auto& { return c.world.grasp_radius; }));
    r.push_back(dbl("world.place_tolerance", [](auto& c) -> auto& {
      return c.world.place_tolerance;
    }));
    r.push_back(integer("world.place_hold_steps", [](auto& c) -> auto& {
      return c.world.place_hold_steps;
    }));
    r.push_back(dbl("world.gripper_speed",
                    [](auto& c) -> auto& { return c.world.gripper_speed; }));
    r.push_back(dbl("world.handle_offset",
                    [](auto& c) -> auto& { return c.world.handle_offset; }));
    r.push_back(dbl("world.min_separation",
                    [](auto& c) -> auto& { return c.world.min_separation; }));
    r.push_back(dbl("world.fixed_target_x", [](auto& c) -> auto& {
      return c.world.fixed_target.x();
    }));
    r.push_back(dbl("world.fixed_target_y", [](auto& c) -> auto& {
      return c.world.fixed_target.y();
    }));
    r.push_back(dbl("world.fixed_camera_angle", [](auto& c) -> auto& {
      return c.world.fixed_camera_angle;
    }));
    r.push_back(dbl("world.gripper_home_x", [](auto& c) -> auto& {
      return c.world.gripper_home.x();
    }));
    r.push_back(dbl("world.gripper_home_y", [](auto& c) -> auto& {
      return c.world.gripper_home.y();
    }));

    r.push_back(
        dbl("motion.v_max", [](auto& c) -> auto& { return c.motion.v_max; }));
    r.push_back(dbl("motion.omega_max",
                    [](auto& c) -> auto& { return c.motion.omega_max; }));
    r.push_back(
        dbl("motion.u_max", [](auto& c) -> auto& { return c.motion.u_max; }));
    r.push_back(dbl("motion.alpha_p",
                    [](auto& c) -> auto& { return c.motion.alpha_p; }));
    r.push_back(
        dbl("motion.beta_p", [](auto& c) -> auto& { return c.motion.beta_p; }));
    r.push_back(dbl("motion.alpha_theta",
                    [](auto& c) -> auto& { return c.motion.alpha_theta; }));
    r.push_back(dbl("motion.beta_theta",
                    [](auto& c) -> auto& { return c.motion.beta_theta; }));
    r.push_back(dbl("motion.alpha_c",
                    [](auto& c) -> auto& { return c.motion.alpha_c; }));
    r.push_back(
        dbl("motion.beta_c", [](auto& c) -> auto& { return c.motion.beta_c; }));

    r.push_back(integer("gen.adc_reset_period", [](auto& c) -> auto& {
      return c.gen.adc_reset_period;
    }));
    r.push_back(dbl("gen.circle_radius",
                    [](auto& c) -> auto& { return c.gen.circle_radius; }));
    r.push_back(integer("gen.circle_count",
                        [](auto& c) -> auto& { return c.gen.circle_count; }));
    r.push_back(integer("gen.max_retries",
                        [](auto& c) -> auto& { return c.gen.max_retries; }));
    r.push_back(dbl("gen.lead_time",
                    [](auto& c) -> auto& { return c.gen.lead_time; }));
    r.push_back(dbl("gen.budget_tolerance",
                    [](auto& c) -> auto& { return c.gen.budget_tolerance; }));

    r.push_back({"policy.arch",
                 [](const AppConfig& c) { return c.policy.arch; },
                 [](AppConfig& c, const std::string& k, const std::string& v) {
                   if (v != "diffusion" && v != "bc") {
                     throw ConfigError("config: '" + k +
                                       "' must be diffusion or bc, got '" + v +
                                       "'");
                   }
                   c.policy.arch = v;
                 }});
    r.push_back(integer("policy.prediction_horizon", [](auto& c) -> auto& {
      return c.policy.prediction_horizon;
    }));
    r.push_back(integer("policy.action_horizon", [](auto& c) -> auto& {
      return c.policy.action_horizon;
    }));
    r.push_back(integer("policy.observation_horizon", [](auto& c) -> auto& {
      return c.policy.observation_horizon;
    }));
    r.push_back({"policy.hidden",
                 [](const AppConfig& c) {
                   return hidden_to_string(c.policy.hidden);
                 },
                 [](AppConfig& c, const std::string& k, const std::string& v) {
                   std::vector<int> dims;
                   std::stringstream ss(v);
                   std::string part;
                   while (std::getline(ss, part, ',')) {
                     dims.push_back(static_cast<int>(to_int(k, part)));
                   }
                   if (dims.empty()) {
                     throw ConfigError("config: '" + k + "' needs widths");
                   }
                   c.policy.hidden = dims;
                 }});
    r.push_back(integer("policy.time_embed_dim", [](auto& c) -> auto& {
      return c.policy.time_embed_dim;
    }));
    r.push_back(integer("policy.train_denoise_steps", [](auto& c) -> auto& {
      return c.policy.train_denoise_steps;
    }));
    r.push_back(integer("policy.val_denoise_steps", [](auto& c) -> auto& {
      return c.policy.val_denoise_steps;
    }));
    r.push_back(dbl("policy.schedule_s",
                    [](auto& c) -> auto& { return c.policy.schedule_s; }));
    r.push_back(integer("policy.train_steps", [](auto& c) -> auto& {
      return c.policy.train_steps;
    }));
    r.push_back(integer("policy.batch_size", [](auto& c) -> auto& {
      return c.policy.batch_size;
    }));
    r.push_back(dbl("policy.learning_rate", [](auto& c) -> auto& {
      return c.policy.learning_rate;
    }));

    r.push_back(integer("eval.resolution",
                        [](auto& c) -> auto& { return c.eval_resolution; }));
    r.push_back(integer("eval.episodes_per_cell", [](auto& c) -> auto& {
      return c.eval_episodes_per_cell;
    }));
    return r;
  }();
  return entries;
}

}  // namespace

void apply_override(AppConfig& cfg, const std::string& key,
                    const std::string& value) {
  for (const Entry& e : registry()) {
    if (key == e.key) {
      e.set(cfg, key, value);
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

void load_config_file(AppConfig& cfg, const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::size_t last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto strip = [](std::string& s) {
      const std::size_t a = s.find_first_not_of(" \t");
      const std::size_t b = s.find_last_not_of(" \t");
      s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
    };
    strip(key);
    strip(value);
    apply_override(cfg, key, value);
  }
}

std::string dump_config(const AppConfig& cfg) {
  std::string out;
  for (const Entry& e : registry()) {
    out += e.key;
    out += " = ";
    out += e.get(cfg);
    out += '\n';
  }
  return out;
}

}  // namespace movebench
