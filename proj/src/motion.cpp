#include "movebench/motion.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace movebench {

namespace {

// Folds x back into [lo, hi] by specular reflection, flipping the direction
// component once per fold. Loops to handle steps larger than the interval.
void reflect_axis(double& x, double& d, double lo, double hi) {
  while (x < lo || x > hi) {
    if (x < lo) {
      x = 2.0 * lo - x;
      d = -d;
    } else {
      x = 2.0 * hi - x;
      d = -d;
    }
  }
}

}  // namespace

void MotionParams::validate() const {
  if (v_max < 0.0 || omega_max < 0.0 || u_max < 0.0) {
    throw std::invalid_argument("MotionParams: speed maxima must be >= 0");
  }
  if (!(alpha_p > 0.0) || !(beta_p > 0.0) || !(alpha_theta > 0.0) ||
      !(beta_theta > 0.0) || !(alpha_c > 0.0) || !(beta_c > 0.0)) {
    throw std::invalid_argument("MotionParams: Beta shapes must be > 0");
  }
}

double sample_speed_fraction(double alpha, double beta, Rng& rng) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument(
        "sample_speed_fraction: shape parameters must be positive");
  }
  return rng.beta(alpha, beta);
}

Eigen::Vector2d sample_direction(Rng& rng) { return rng.unit_vector(); }

MotionState advance_translation(const MotionState& state,
                                const MotionParams& params, const Rect& bounds,
                                double dt) {
  if (!bounds.contains(state.pos)) {
    throw std::domain_error("advance_translation: position outside bounds");
  }
  MotionState out = state;
  const Eigen::Vector2d step = translation_velocity(state, params) * dt;
  out.pos += step;
  reflect_axis(out.pos.x(), out.dir.x(), bounds.lo.x(), bounds.hi.x());
  reflect_axis(out.pos.y(), out.dir.y(), bounds.lo.y(), bounds.hi.y());
  return out;
}

MotionState advance_rotation(const MotionState& state,
                             const MotionParams& params, double dt) {
  MotionState out = state;
  out.heading = wrap_angle(state.heading +
                           state.spin * state.omega_frac * params.omega_max * dt);
  return out;
}

CameraMotionState advance_camera(const CameraMotionState& state,
                                 const MotionParams& params, double dt) {
  CameraMotionState out = state;
  out.angle += state.dir * state.speed_frac * params.u_max * dt;
  double d = static_cast<double>(out.dir);
  reflect_axis(out.angle, d, 0.0, std::numbers::pi);
  out.dir = d < 0.0 ? -1 : 1;
  return out;
}

void apply_schedule(const AugmentationSchedule& schedule, Phase phase,
                    MotionSet& motions, const MotionParams& params,
                    const Rect& bounds, double dt) {
  if (phase == Phase::kPick) {
    if (schedule.pick_object_translation) {
      motions.object = advance_translation(motions.object, params, bounds, dt);
    }
    if (schedule.pick_object_rotation) {
      motions.object = advance_rotation(motions.object, params, dt);
    }
    if (schedule.pick_camera) {
      motions.camera = advance_camera(motions.camera, params, dt);
    }
  } else if (phase == Phase::kPlace) {
    if (schedule.place_target_translation) {
      motions.target = advance_translation(motions.target, params, bounds, dt);
    }
    if (schedule.place_camera) {
      motions.camera = advance_camera(motions.camera, params, dt);
    }
  }
}

double wrap_angle(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta + std::numbers::pi, two_pi);
  if (w <= 0.0) w += two_pi;
  return w - std::numbers::pi;
}

}  // namespace movebench
