#pragma once

#include <Eigen/Core>

#include "movebench/rng.h"

namespace movebench {

// Axis-aligned rectangle, used for workspace bounds and bounce limits.
struct Rect {
  Eigen::Vector2d lo{-0.3, -0.3};
  Eigen::Vector2d hi{0.3, 0.3};

  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() &&
           p.y() <= hi.y();
  }
};

// Intensity and shape parameters of the kinematic augmentation laws.
// Speeds are sampled as fractions of the maxima from Beta distributions;
// the Beta(2, 5) default biases draws toward slow motion.
struct MotionParams {
  double v_max = 0.05;      // max translation speed, m/s
  double omega_max = 0.5;   // max angular speed, rad/s
  double u_max = 0.2;       // max camera angular speed, rad/s
  double alpha_p = 2.0;
  double beta_p = 5.0;
  double alpha_theta = 2.0;
  double beta_theta = 5.0;
  double alpha_c = 2.0;
  double beta_c = 5.0;

  void validate() const;
};

// Kinematic state of one moving entity: constant-speed linear translation
// plus constant angular velocity about the vertical axis.
struct MotionState {
  Eigen::Vector2d pos{0.0, 0.0};
  Eigen::Vector2d dir{1.0, 0.0};  // unit translation direction
  double speed_frac = 0.0;        // in [0, 1], fraction of v_max
  double heading = 0.0;           // rad, in (-pi, pi]
  double omega_frac = 0.0;        // in [0, 1], fraction of omega_max
  int spin = 1;                   // rotation direction, -1 or +1
};

// Camera state on a fixed-radius arc about the scene center.
struct CameraMotionState {
  double angle = 1.5707963267948966;  // rad, in [0, pi]
  double speed_frac = 0.0;            // in [0, 1], fraction of u_max
  int dir = 1;                        // arc direction, -1 or +1
};

enum class Phase { kPick, kPlace, kDone };

// Which entities move during which semantic task phase. The all-false
// schedule is the static collection paradigm.
struct AugmentationSchedule {
  bool pick_object_translation = false;
  bool pick_object_rotation = false;
  bool pick_camera = false;
  bool place_target_translation = false;
  bool place_camera = false;

  static AugmentationSchedule none() { return {}; }
  static AugmentationSchedule move_full() {
    return {true, true, true, true, true};
  }
  bool any() const {
    return pick_object_translation || pick_object_rotation || pick_camera ||
           place_target_translation || place_camera;
  }
  bool operator==(const AugmentationSchedule&) const = default;
};

// One Beta(alpha, beta) variate; the speed fraction of Eq-style motion laws.
double sample_speed_fraction(double alpha, double beta, Rng& rng);

// Uniform direction on the unit circle (planar specialization of the
// uniform-sphere draw).
Eigen::Vector2d sample_direction(Rng& rng);

// Advances position by speed_frac*v_max*dt along dir, reflecting off the
// bounds with the matching direction component sign-flipped. Speed is
// preserved across bounces. Throws std::domain_error if pos starts outside
// bounds.
MotionState advance_translation(const MotionState& state,
                                const MotionParams& params, const Rect& bounds,
                                double dt);

// Advances heading by spin*omega_frac*omega_max*dt, wrapped to (-pi, pi].
MotionState advance_rotation(const MotionState& state,
                             const MotionParams& params, double dt);

// Advances the camera angle by dir*speed_frac*u_max*dt, reflecting at 0 and
// pi with a direction flip.
CameraMotionState advance_camera(const CameraMotionState& state,
                                 const MotionParams& params, double dt);

struct MotionSet {
  MotionState object;
  MotionState target;
  CameraMotionState camera;
};

// Advances exactly the entities the schedule activates for the given phase;
// the rest are left untouched. Pick phase may move the object (translation,
// rotation) and camera; place phase may move the target and camera.
void apply_schedule(const AugmentationSchedule& schedule, Phase phase,
                    MotionSet& motions, const MotionParams& params,
                    const Rect& bounds, double dt);

// Wraps an angle into (-pi, pi].
double wrap_angle(double theta);

// Current world-frame translation velocity of a motion state.
inline Eigen::Vector2d translation_velocity(const MotionState& state,
                                            const MotionParams& params) {
  return state.dir * (state.speed_frac * params.v_max);
}

}  // namespace movebench
