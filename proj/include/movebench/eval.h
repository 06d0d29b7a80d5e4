#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "movebench/datagen.h"
#include "movebench/policy.h"

namespace movebench {

// Anything able to act in the world: trained policies, the scripted expert
// (oracle upper bound), or a random baseline (null reference).
class Agent {
 public:
  virtual ~Agent() = default;
  virtual void reset(std::uint64_t seed) = 0;
  virtual Action act(const WorldConfig& cfg, const WorldState& state) = 0;
};

// Fresh agents per worker; instances need not be thread-safe.
using AgentFactory = std::function<std::unique_ptr<Agent>()>;

AgentFactory policy_agent(const Policy& policy);
AgentFactory expert_agent(const MotionParams& params, double lead_time);
AgentFactory random_agent();

struct EvalConfig {
  int resolution = 13;
  int episodes_per_cell = 3;
  RandomizationLevel level = RandomizationLevel::kObjectOnly;
  std::uint64_t seed = 0;
  int max_steps = 0;  // 0 = world step limit
  int jobs = 1;
};

struct CellResult {
  double x = 0.0, y = 0.0;
  int attempts = 0;
  int successes = 0;   // episodes scoring 3
  int total_score = 0;
};

struct EvalReport {
  int resolution = 0;
  double lo = 0.0, hi = 0.0;  // grid extents on both axes
  int episodes_per_cell = 0;
  RandomizationLevel level = RandomizationLevel::kObjectOnly;
  std::uint64_t seed = 0;
  std::vector<CellResult> cells;  // row-major, index = iy * resolution + ix
  int attempts = 0;
  int successes = 0;
  int total_score = 0;
  double success_rate = 0.0;
  std::array<int, 4> score_counts{};  // episodes by rubric score
  std::string policy_digest;
  std::string dataset_digest;
};

// Rolls episodes_per_cell episodes at every grid cell center (object start);
// other factors follow the randomization level with per-cell derived seeds.
EvalReport eval_grid(const AgentFactory& make_agent, const WorldConfig& world,
                     const EvalConfig& cfg);

// Convenience wrapper: evaluates a trained policy and stamps its digest.
EvalReport eval_policy_grid(const Policy& policy, const WorldConfig& world,
                            const EvalConfig& cfg);

// Total rubric points / (3 x episodes). Throws on zero attempts.
double normalized_score(const EvalReport& report);

// Success rate over the cells selected by `keep(cell)`.
double partition_success(const EvalReport& report,
                         const std::function<bool(const CellResult&)>& keep);

// cells.csv, summary.json, heatmap.pgm under dir (created if needed).
void write_report(const EvalReport& report, const std::string& dir);

// ---- Canned experiment suites ----

struct ComparisonOptions {
  std::string experiment;  // sparse9|dense|circle|ladder|dims|vmax|triple
  std::int64_t budget = 20000;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string out_dir;  // empty = no artifacts
  int jobs = 1;
  WorldConfig world;
  MotionParams motion;
  DatagenConfig gen;
  PolicyConfig policy;
  int resolution = 13;
  int episodes_per_cell = 3;
};

struct ArmSummary {
  std::string name;
  bool failed = false;
  std::string error;
  std::vector<double> success_by_seed;
  std::vector<double> score_by_seed;        // normalized score
  std::vector<std::int64_t> budget_by_seed;  // actual dataset timesteps
  double mean_success = 0.0, std_success = 0.0;
  double mean_score = 0.0, std_score = 0.0;
  // Circle experiment only: success split by grid cells inside/outside the
  // sampling circle.
  std::vector<double> in_success_by_seed, out_success_by_seed;
  double mean_in_success = 0.0, mean_out_success = 0.0;
};

struct ComparisonReport {
  std::string experiment;
  std::int64_t budget = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<ArmSummary> arms;
};

// Builds datasets, trains, and grid-evaluates every arm of the named
// experiment for every seed; per-arm failures are recorded, not fatal.
ComparisonReport run_comparison(const ComparisonOptions& opts);

void write_comparison(const ComparisonReport& report, const std::string& dir);

}  // namespace movebench
