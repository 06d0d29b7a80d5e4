#include "movebench/world.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace movebench {

namespace {

Eigen::Vector2d clamp_to(const Rect& r, const Eigen::Vector2d& p) {
  return {std::clamp(p.x(), r.lo.x(), r.hi.x()),
          std::clamp(p.y(), r.lo.y(), r.hi.y())};
}

}  // namespace

Eigen::Vector2d rotate(double angle, const Eigen::Vector2d& v) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

MotionInit MotionInit::sample(const MotionParams& params, Rng& rng) {
  MotionInit init;
  init.object_dir = sample_direction(rng);
  init.object_speed_frac = sample_speed_fraction(params.alpha_p, params.beta_p, rng);
  init.object_omega_frac =
      sample_speed_fraction(params.alpha_theta, params.beta_theta, rng);
  init.object_spin = rng.sign();
  init.target_dir = sample_direction(rng);
  init.target_speed_frac = sample_speed_fraction(params.alpha_p, params.beta_p, rng);
  init.camera_speed_frac = sample_speed_fraction(params.alpha_c, params.beta_c, rng);
  init.camera_dir = rng.sign();
  return init;
}

SpatialConfig randomize_config(const WorldConfig& cfg, RandomizationLevel level,
                               Rng& rng) {
  const Rect ws = cfg.workspace();
  SpatialConfig config;
  config.level = level;
  config.camera_angle = level >= RandomizationLevel::kObjectTargetCamera
                            ? rng.uniform(0.0, std::numbers::pi)
                            : cfg.fixed_camera_angle;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    config.object_pos = {rng.uniform(ws.lo.x(), ws.hi.x()),
                         rng.uniform(ws.lo.y(), ws.hi.y())};
    config.target_pos = level >= RandomizationLevel::kObjectTarget
                            ? Eigen::Vector2d{rng.uniform(ws.lo.x(), ws.hi.x()),
                                              rng.uniform(ws.lo.y(), ws.hi.y())}
                            : cfg.fixed_target;
    if ((config.object_pos - config.target_pos).norm() >= cfg.min_separation) {
      config.object_heading = wrap_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));
      return config;
    }
  }
  throw std::runtime_error("randomize_config: separation rejection exhausted");
}

void randomize_upper_factors(const WorldConfig& cfg, RandomizationLevel level,
                             const Eigen::Vector2d& object_pos, Rng& rng,
                             SpatialConfig& config) {
  config.level = level;
  if (level >= RandomizationLevel::kObjectTarget) {
    const Rect ws = cfg.workspace();
    bool found = false;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      config.target_pos = {rng.uniform(ws.lo.x(), ws.hi.x()),
                           rng.uniform(ws.lo.y(), ws.hi.y())};
      if ((config.target_pos - object_pos).norm() >= cfg.min_separation) {
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::runtime_error("target separation rejection exhausted");
    }
  } else {
    config.target_pos = cfg.fixed_target;
  }
  config.camera_angle = level >= RandomizationLevel::kObjectTargetCamera
                            ? rng.uniform(0.0, std::numbers::pi)
                            : cfg.fixed_camera_angle;
}

Eigen::Vector2d grasp_point(const WorldConfig& cfg, const MotionState& object) {
  return object.pos + cfg.handle_offset * Eigen::Vector2d{std::cos(object.heading),
                                                          std::sin(object.heading)};
}

WorldState make_world(const WorldConfig& cfg, const SpatialConfig& config,
                      const MotionInit& init) {
  WorldState st;
  st.gripper_pos = cfg.gripper_home;
  st.object.pos = config.object_pos;
  st.object.heading = config.object_heading;
  st.object.dir = init.object_dir;
  st.object.speed_frac = init.object_speed_frac;
  st.object.omega_frac = init.object_omega_frac;
  st.object.spin = init.object_spin;
  st.target.pos = config.target_pos;
  st.target.dir = init.target_dir;
  st.target.speed_frac = init.target_speed_frac;
  st.camera.angle = config.camera_angle;
  st.camera.speed_frac = init.camera_speed_frac;
  st.camera.dir = init.camera_dir;
  return st;
}

void step(const WorldConfig& cfg, const AugmentationSchedule& schedule,
          const MotionParams& params, WorldState& st, const Action& action) {
  if (st.phase == Phase::kDone) {
    throw std::logic_error("step: episode already finished");
  }
  const Rect ws = cfg.workspace();

  // Integrate the gripper command, camera frame -> world frame.
  const Eigen::Vector2d cmd{std::clamp(action.vx, -1.0, 1.0),
                            std::clamp(action.vy, -1.0, 1.0)};
  const double grasp_cmd = std::clamp(action.grasp, 0.0, 1.0);
  const Eigen::Vector2d vel =
      rotate(st.camera.angle, cmd) * cfg.gripper_speed;
  st.gripper_pos = clamp_to(ws, st.gripper_pos + vel * cfg.dt);

  // Grasp / release.
  if (grasp_cmd >= 0.5) {
    if (!st.grasped &&
        (st.gripper_pos - grasp_point(cfg, st.object)).norm() <= cfg.grasp_radius) {
      st.grasped = true;
      st.place_hold = 0;
      if (st.phase == Phase::kPick) st.phase = Phase::kPlace;
      if (!st.events.grasped) st.events.grasped = st.step_count;
    }
  } else if (st.grasped) {
    st.grasped = false;
  }

  // A held object rides the gripper.
  if (st.grasped) st.object.pos = st.gripper_pos;

  // Scheduled augmentation motions for the current phase.
  MotionSet motions{st.object, st.target, st.camera};
  apply_schedule(schedule, st.phase, motions, params, ws, cfg.dt);
  st.object = motions.object;
  st.target = motions.target;
  st.camera = motions.camera;

  // Placement succeeds after enough consecutive released in-tolerance steps;
  // requires a grasp to have happened so a lucky spawn cannot auto-complete.
  if (st.phase == Phase::kPlace && !st.grasped && grasp_cmd < 0.5 &&
      (st.object.pos - st.target.pos).norm() <= cfg.place_tolerance) {
    if (++st.place_hold >= cfg.place_hold_steps) {
      if (!st.events.placed) st.events.placed = st.step_count;
      st.phase = Phase::kDone;
    }
  } else {
    st.place_hold = 0;
  }

  if (!st.events.approached &&
      (st.gripper_pos - grasp_point(cfg, st.object)).norm() <= cfg.grasp_radius) {
    st.events.approached = st.step_count;
  }

  ++st.step_count;
}

Observation observe(const WorldConfig& cfg, const WorldState& st) {
  const double phi = st.camera.angle;
  const Eigen::Vector2d grip = rotate(-phi, st.gripper_pos);
  const Eigen::Vector2d handle = rotate(-phi, grasp_point(cfg, st.object));
  const Eigen::Vector2d target = rotate(-phi, st.target.pos);
  const double rel = st.object.heading - phi;
  return {grip.x(),   grip.y(),          handle.x(),
          handle.y(), std::sin(rel),     std::cos(rel),
          target.x(), target.y(),        st.grasped ? 1.0 : 0.0};
}

void teleport_object(WorldState& st, const Eigen::Vector2d& pos, double heading) {
  st.object.pos = pos;
  st.object.heading = heading;
}

int score_episode(const EventLog& events) {
  if (events.placed) return 3;
  if (events.grasped) return 2;
  if (events.approached) return 1;
  return 0;
}

}  // namespace movebench
