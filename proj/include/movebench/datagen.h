#pragma once

#include <optional>
#include <vector>

#include "movebench/dataset.h"
#include "movebench/expert.h"
#include "movebench/motion.h"
#include "movebench/world.h"

namespace movebench {

// Knobs of the collection machinery itself (not of the world or the task).
struct DatagenConfig {
  int adc_reset_period = 40;     // steps between teleports until first grasp
  double circle_radius = 0.18;
  int circle_count = 12;
  int max_retries = 5;           // extra expert rolls per trajectory slot
  double lead_time = 0.5;        // expert pursuit lead, seconds
  double budget_tolerance = 0.05;
  int max_trajectories = 200000;
};

// What to generate: one (paradigm, sampling, budget, level) cell.
struct GenSpec {
  Paradigm paradigm = Paradigm::kStatic;
  Sampling sampling = Sampling::kDenseUniform;
  std::int64_t budget = 20000;  // total timesteps, matched within tolerance
  RandomizationLevel level = RandomizationLevel::kObjectOnly;
  std::uint64_t seed = 0;
  // Replaces the level-derived schedule (move paradigm only); lets the
  // dimension ablation switch individual augmentation axes on and off.
  std::optional<AugmentationSchedule> schedule_override;
};

// The 3x3 grid of designated starts at {-0.2, 0, 0.2}^2.
std::vector<Eigen::Vector2d> sparse9_points();

// `count` points evenly spaced on the circle of the given radius, starting
// at angle 0.
std::vector<Eigen::Vector2d> circle_points(double radius, int count);

// The complete staged augmentation: object translation+rotation and camera
// motion while picking, target translation and camera motion while placing.
AugmentationSchedule full_schedule();

// Digest of the physical parameters a dataset was generated under; stored in
// the dataset header so training can detect config drift.
std::string config_digest(const WorldConfig& world, const MotionParams& motion);

// Collects expert demonstrations until the timestep budget is met (within
// tolerance). Deterministic in spec.seed. Throws GenerationError when the
// budget cannot be matched or collection stalls.
Dataset build_dataset(const WorldConfig& world, const MotionParams& motion,
                      const DatagenConfig& gen, const GenSpec& spec);

}  // namespace movebench
