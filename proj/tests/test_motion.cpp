#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "movebench/motion.h"
#include "movebench/rng.h"

using namespace movebench;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("beta mean matches alpha/(alpha+beta)") {
  Rng rng(7);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_speed_fraction(2.0, 5.0, rng);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 2.0 / 7.0) < 0.01);

  // Mean and variance within 3 standard errors of the analytic values.
  const double var = sumsq / n - mean * mean;
  const double true_var = 10.0 / (49.0 * 8.0);
  const double se_mean = std::sqrt(true_var / n);
  CHECK(std::abs(mean - 2.0 / 7.0) < 3.0 * se_mean);
  // SE of the sample variance ~ sqrt((m4 - var^2)/n); bound m4 by 1.
  CHECK(std::abs(var - true_var) < 3.0 * std::sqrt(1.0 / n));
}

TEST_CASE("beta(1,1) is uniform (KS test)") {
  Rng rng(11);
  const int n = 100000;
  std::vector<double> xs(n);
  for (double& x : xs) x = sample_speed_fraction(1.0, 1.0, rng);
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f_lo = static_cast<double>(i) / n;
    const double f_hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(xs[i] - f_lo), std::abs(xs[i] - f_hi)));
  }
  CHECK(d < 0.01);
}

TEST_CASE("beta draws are deterministic per seed") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_speed_fraction(2.0, 5.0, a) ==
          sample_speed_fraction(2.0, 5.0, b));
  }
}

TEST_CASE("beta rejects non-positive shapes") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_speed_fraction(0.0, 5.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_speed_fraction(2.0, -1.0, rng), std::invalid_argument);
}

TEST_CASE("directions are unit and isotropic") {
  Rng rng(13);
  const int n = 100000;
  Eigen::Vector2d mean{0.0, 0.0};
  std::array<int, 8> bins{};
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d d = sample_direction(rng);
    CHECK(std::abs(d.norm() - 1.0) < 1e-9);
    mean += d;
    const double a = std::atan2(d.y(), d.x());  // (-pi, pi]
    int bin = static_cast<int>((a + kPi) / (2.0 * kPi) * 8.0);
    bins[std::clamp(bin, 0, 7)] += 1;
  }
  CHECK(mean.norm() / n < 0.02);
  const double p = 1.0 / 8.0;
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  for (int count : bins) {
    CHECK(std::abs(static_cast<double>(count) / n - p) < 3.0 * sigma);
  }
}

TEST_CASE("translation: zero speed, interior step, reflection") {
  MotionParams params;
  params.v_max = 0.05;
  const Rect bounds;  // [-0.3, 0.3]^2

  MotionState still;
  still.pos = {0.1, -0.2};
  still.speed_frac = 0.0;
  const MotionState after = advance_translation(still, params, bounds, 123.0);
  CHECK(after.pos == still.pos);

  MotionState s;
  s.pos = {0.0, 0.0};
  s.dir = {1.0, 0.0};
  s.speed_frac = 1.0;
  const MotionState stepped = advance_translation(s, params, bounds, 1.0);
  CHECK(stepped.pos.x() == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(stepped.pos.y() == doctest::Approx(0.0).epsilon(1e-12));

  s.pos = {0.28, 0.0};
  const MotionState bounced = advance_translation(s, params, bounds, 1.0);
  CHECK(bounced.pos.x() == doctest::Approx(0.27).epsilon(1e-12));
  CHECK(bounced.dir.x() == doctest::Approx(-1.0));
  CHECK(bounced.speed_frac == s.speed_frac);
}

TEST_CASE("translation rejects out-of-bounds start") {
  MotionParams params;
  MotionState s;
  s.pos = {0.31, 0.0};
  CHECK_THROWS_AS(advance_translation(s, params, Rect{}, 0.04),
                  std::domain_error);
}

TEST_CASE("rotation: zero, wrap, spin symmetry") {
  MotionParams params;
  params.omega_max = 0.5;

  MotionState s;
  s.heading = 1.0;
  s.omega_frac = 0.0;
  CHECK(advance_rotation(s, params, 10.0).heading == 1.0);

  s.heading = 3.0;
  s.omega_frac = 1.0;
  s.spin = 1;
  const double wrapped = advance_rotation(s, params, 1.0).heading;
  CHECK(wrapped == doctest::Approx(3.5 - 2.0 * kPi).epsilon(1e-12));

  s.heading = 0.25;
  s.spin = -1;
  const double back = advance_rotation(s, params, 1.0).heading;
  CHECK(back == doctest::Approx(0.25 - 0.5).epsilon(1e-12));
}

TEST_CASE("camera: zero, interior, reflection at pi") {
  MotionParams params;
  params.u_max = 0.1;

  CameraMotionState c;
  c.angle = 1.0;
  c.speed_frac = 0.0;
  CHECK(advance_camera(c, params, 5.0).angle == 1.0);

  c.speed_frac = 1.0;
  c.dir = 1;
  CHECK(advance_camera(c, params, 5.0).angle == doctest::Approx(1.5));

  c.angle = 3.10;
  const CameraMotionState r = advance_camera(c, params, 1.0);
  CHECK(r.angle == doctest::Approx(kPi - (3.20 - kPi)).epsilon(1e-12));
  CHECK(r.dir == -1);
}

TEST_CASE("schedule gates exactly the flagged entities per phase") {
  MotionParams params;
  const Rect bounds;
  Rng rng(3);

  MotionSet base;
  base.object.pos = {0.1, 0.1};
  base.object.dir = sample_direction(rng);
  base.object.speed_frac = 0.5;
  base.object.heading = 0.3;
  base.object.omega_frac = 0.5;
  base.target.pos = {-0.1, 0.2};
  base.target.dir = sample_direction(rng);
  base.target.speed_frac = 0.7;
  base.camera.angle = 1.2;
  base.camera.speed_frac = 0.4;

  MotionSet still = base;
  apply_schedule(AugmentationSchedule::none(), Phase::kPick, still, params,
                 bounds, 0.04);
  CHECK(still.object.pos == base.object.pos);
  CHECK(still.object.heading == base.object.heading);
  CHECK(still.target.pos == base.target.pos);
  CHECK(still.camera.angle == base.camera.angle);

  AugmentationSchedule trans_only;
  trans_only.pick_object_translation = true;
  MotionSet picked = base;
  apply_schedule(trans_only, Phase::kPick, picked, params, bounds, 0.04);
  CHECK(picked.object.pos != base.object.pos);
  CHECK(picked.object.heading == base.object.heading);
  CHECK(picked.target.pos == base.target.pos);
  CHECK(picked.camera.angle == base.camera.angle);

  // Pick-phase flags are inert during place.
  MotionSet placing = base;
  apply_schedule(trans_only, Phase::kPlace, placing, params, bounds, 0.04);
  CHECK(placing.object.pos == base.object.pos);

  MotionSet full = base;
  apply_schedule(AugmentationSchedule::move_full(), Phase::kPlace, full, params,
                 bounds, 0.04);
  CHECK(full.object.pos == base.object.pos);  // held object is not advanced
  CHECK(full.target.pos != base.target.pos);
  CHECK(full.camera.angle != base.camera.angle);
}

TEST_CASE("boundedness and speed conservation under long rollouts") {
  MotionParams params;
  params.v_max = 0.05;
  params.u_max = 0.2;
  const Rect bounds;
  Rng rng(17);

  for (int trial = 0; trial < 20; ++trial) {
    MotionState s;
    s.pos = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
    s.dir = sample_direction(rng);
    s.speed_frac = rng.uniform();
    CameraMotionState c;
    c.angle = rng.uniform(0.0, kPi);
    c.speed_frac = rng.uniform();
    c.dir = rng.sign();
    const double frac0 = s.speed_frac;
    for (int i = 0; i < 5000; ++i) {
      s = advance_translation(s, params, bounds, 0.04);
      c = advance_camera(c, params, 0.04);
      CHECK(bounds.contains(s.pos));
      CHECK(c.angle >= 0.0);
      CHECK(c.angle <= kPi);
    }
    CHECK(s.speed_frac == frac0);
    CHECK(s.dir.norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("translation reverses when no boundary is crossed") {
  MotionParams params;
  params.v_max = 0.05;
  const Rect bounds;
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    MotionState s;
    s.pos = {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
    s.dir = sample_direction(rng);
    s.speed_frac = rng.uniform();
    MotionState fwd = advance_translation(s, params, bounds, 0.04);
    fwd.dir = -fwd.dir;
    const MotionState back = advance_translation(fwd, params, bounds, 0.04);
    CHECK((back.pos - s.pos).norm() < 1e-9);
  }
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(0.1) == doctest::Approx(0.1));
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double w = wrap_angle(rng.uniform(-50.0, 50.0));
    CHECK(w > -kPi - 1e-12);
    CHECK(w <= kPi + 1e-12);
  }
}
