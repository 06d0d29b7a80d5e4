#pragma once

#include <stdexcept>
#include <string>

#include "movebench/datagen.h"
#include "movebench/policy.h"

namespace movebench {

// Unknown key, malformed value, unreadable file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every tunable the tools expose, bundled so one key=value file (or a set of
// overrides) can steer generation, training, and evaluation consistently.
struct AppConfig {
  WorldConfig world;
  MotionParams motion;
  DatagenConfig gen;
  PolicyConfig policy;
  int eval_resolution = 13;
  int eval_episodes_per_cell = 3;
};

// Applies one `section.key=value` override. Throws ConfigError on unknown
// keys or values that do not parse as the field's type.
void apply_override(AppConfig& cfg, const std::string& key,
                    const std::string& value);

// Flat key=value file: one assignment per line, `#` comments, blank lines
// ignored. Later lines win over earlier ones.
void load_config_file(AppConfig& cfg, const std::string& path);

// Every key with its current value, one `key = value` line each, in a fixed
// order — echoing this reproduces the run.
std::string dump_config(const AppConfig& cfg);

}  // namespace movebench
