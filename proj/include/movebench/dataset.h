#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "movebench/world.h"

namespace movebench {

enum class Paradigm { kStatic, kAdc, kMove };
enum class Sampling { kSparse9, kDenseUniform, kCircle };

std::string to_string(Paradigm p);
std::string to_string(Sampling s);
Paradigm paradigm_from_string(const std::string& s);
Sampling sampling_from_string(const std::string& s);

// One successful expert demonstration.
struct Trajectory {
  SpatialConfig config;
  AugmentationSchedule schedule;
  std::vector<Observation> observations;
  std::vector<Action> actions;
  std::uint64_t seed = 0;
  Paradigm paradigm = Paradigm::kStatic;

  int length() const { return static_cast<int>(observations.size()); }
};

struct GenerationStats {
  std::int64_t attempts = 0;
  std::int64_t failures = 0;
};

// A budget-matched collection of trajectories; the unit of training data.
struct Dataset {
  std::vector<Trajectory> trajectories;
  std::int64_t total_timesteps = 0;
  Paradigm paradigm = Paradigm::kStatic;
  Sampling sampling = Sampling::kDenseUniform;
  std::int64_t budget = 0;
  std::uint64_t seed = 0;
  std::string world_config_digest;
  GenerationStats stats;
};

// Malformed/garbled/version-mismatched dataset or checkpoint files.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when collection cannot satisfy its contract (budget, retries).
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Line-oriented text container: JSON header line, one JSON record per
// trajectory (numbers at 9 significant digits), decimal CRC32 trailer line.
void write_dataset(const Dataset& dataset, const std::string& path);
Dataset read_dataset(const std::string& path);

std::string serialize_dataset(const Dataset& dataset);
Dataset parse_dataset(const std::string& text);

}  // namespace movebench
