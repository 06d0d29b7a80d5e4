#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>

#include "movebench/motion.h"
#include "movebench/rng.h"

namespace movebench {

inline constexpr double kHalfPi = 1.5707963267948966;

// Table-top randomization ladder: each level randomizes one more spatial
// factor at episode start.
enum class RandomizationLevel {
  kObjectOnly = 1,
  kObjectTarget = 2,
  kObjectTargetCamera = 3,
};

// Fixed physical parameters of the desk world.
struct WorldConfig {
  double workspace_half = 0.3;  // workspace is [-half, half]^2, meters
  double dt = 0.04;             // control period, 25 Hz
  int step_limit = 600;
  double grasp_radius = 0.03;
  double place_tolerance = 0.03;
  int place_hold_steps = 5;    // consecutive released in-tolerance steps
  double gripper_speed = 0.25;  // m/s, > v_max so moving grasps stay feasible
  double handle_offset = 0.02;  // grasp handle distance from object center
  double min_separation = 0.08;
  Eigen::Vector2d fixed_target{0.20, 0.20};
  double fixed_camera_angle = kHalfPi;
  Eigen::Vector2d gripper_home{0.0, -0.25};

  Rect workspace() const {
    return {{-workspace_half, -workspace_half},
            {workspace_half, workspace_half}};
  }
};

// One spatial configuration: where everything starts and which factors were
// randomized to produce it.
struct SpatialConfig {
  Eigen::Vector2d object_pos{0.0, 0.0};
  double object_heading = 0.0;
  Eigen::Vector2d target_pos{0.20, 0.20};
  double camera_angle = kHalfPi;
  RandomizationLevel level = RandomizationLevel::kObjectOnly;
};

// Per-entity motion draws for one episode. Sampled up front so static and
// augmented episodes consume the stream identically.
struct MotionInit {
  Eigen::Vector2d object_dir{1.0, 0.0};
  double object_speed_frac = 0.0;
  double object_omega_frac = 0.0;
  int object_spin = 1;
  Eigen::Vector2d target_dir{1.0, 0.0};
  double target_speed_frac = 0.0;
  double camera_speed_frac = 0.0;
  int camera_dir = 1;

  static MotionInit sample(const MotionParams& params, Rng& rng);
  static MotionInit zero() { return {}; }
};

struct EventLog {
  std::optional<int> approached;
  std::optional<int> grasped;
  std::optional<int> placed;
};

struct WorldState {
  Eigen::Vector2d gripper_pos{0.0, 0.0};
  MotionState object;
  MotionState target;  // heading/rotation unused for the target
  CameraMotionState camera;
  bool grasped = false;
  Phase phase = Phase::kPick;
  int step_count = 0;
  int place_hold = 0;
  EventLog events;
};

// 9-vector state observation, everything expressed in the camera frame.
using Observation = std::array<double, 9>;
inline constexpr int kObservationDim = 9;
inline constexpr int kActionDim = 3;

// Velocity command in the camera frame (components in [-1, 1], scaled by
// gripper_speed) plus a grasp command in [0, 1] thresholded at 0.5.
struct Action {
  double vx = 0.0;
  double vy = 0.0;
  double grasp = 0.0;
};

// Rotates v by the given angle about the origin.
Eigen::Vector2d rotate(double angle, const Eigen::Vector2d& v);

// Draws a spatial configuration for the given ladder level; lower-level
// factors stay at their fixed defaults. Object/target separation is
// enforced by rejection.
SpatialConfig randomize_config(const WorldConfig& cfg, RandomizationLevel level,
                               Rng& rng);

// Target and camera factors for a fixed object position, same per-level
// rules as randomize_config. Leaves object fields untouched.
void randomize_upper_factors(const WorldConfig& cfg, RandomizationLevel level,
                             const Eigen::Vector2d& object_pos, Rng& rng,
                             SpatialConfig& config);

// Handle position: object center plus handle_offset along the heading.
Eigen::Vector2d grasp_point(const WorldConfig& cfg, const MotionState& object);

WorldState make_world(const WorldConfig& cfg, const SpatialConfig& config,
                      const MotionInit& init);

// Advances the world by one control step. Throws std::logic_error if called
// on a finished episode.
void step(const WorldConfig& cfg, const AugmentationSchedule& schedule,
          const MotionParams& params, WorldState& state, const Action& action);

Observation observe(const WorldConfig& cfg, const WorldState& state);

// Replaces the object pose; used by the teleport-style collection baseline.
void teleport_object(WorldState& state, const Eigen::Vector2d& pos,
                     double heading);

// 0 = never approached, 1 = approached, 2 = grasped, 3 = placed.
int score_episode(const EventLog& events);

}  // namespace movebench
