#pragma once

#include <functional>
#include <optional>

#include "movebench/dataset.h"
#include "movebench/motion.h"
#include "movebench/rng.h"
#include "movebench/world.h"

namespace movebench {

// Everything needed to roll one episode deterministically.
struct EpisodeSetup {
  SpatialConfig config;
  AugmentationSchedule schedule;
  MotionInit motion;
  // If set, the object teleports to a fresh pose every this-many steps until
  // it is grasped (the ADC regime).
  std::optional<int> reset_period;
};

struct EpisodeResult {
  std::vector<Observation> observations;
  std::vector<Action> actions;
  EventLog events;
  int score = 0;
};

// Saturated pursuit of the (lead-predicted) grasp point or drop target.
// Throws std::logic_error if the episode is already done.
Action expert_action(const WorldConfig& cfg, const MotionParams& params,
                     const AugmentationSchedule& schedule,
                     const WorldState& state, double lead_time);

// Rolls a full episode under the scripted expert, recording an
// (observation, action) pair per step. `rng` drives ADC teleports only.
EpisodeResult run_expert_episode(const WorldConfig& cfg,
                                 const MotionParams& params,
                                 const EpisodeSetup& setup, Rng& rng,
                                 double lead_time);

struct CollectedEpisode {
  EpisodeResult result;
  EpisodeSetup setup;
  int episodes_rolled = 0;  // every roll, including the successful one
};

// Draws a fresh setup and rolls an episode until one scores 3 or the retry
// budget (1 + max_retries rolls) runs out; nullopt on exhaustion.
std::optional<CollectedEpisode> collect_episode(
    const WorldConfig& cfg, const MotionParams& params,
    const std::function<EpisodeSetup(Rng&)>& setup_fn, Rng& rng,
    double lead_time, int max_retries);

}  // namespace movebench
