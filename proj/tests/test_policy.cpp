#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "movebench/datagen.h"
#include "movebench/policy.h"

using namespace movebench;

TEST_CASE("noise schedule shape") {
  const auto abar = make_noise_schedule(100);
  REQUIRE(abar.size() == 101);
  CHECK(abar[0] == 1.0);
  for (std::size_t t = 1; t < abar.size(); ++t) {
    CHECK(abar[t] < abar[t - 1]);
    CHECK(abar[t] > 0.0);
    CHECK(abar[t] <= 1.0);
  }
  CHECK(abar[100] < 0.01);
  CHECK_THROWS_AS(make_noise_schedule(0), std::invalid_argument);
}

TEST_CASE("forward_noise endpoints and variance") {
  Rng rng(3);
  const int dim = 12;
  Eigen::VectorXd x0(dim), eps(dim);
  for (int i = 0; i < dim; ++i) {
    x0[i] = rng.uniform(-1.0, 1.0);
    eps[i] = rng.normal();
  }
  CHECK((forward_noise(x0, eps, 1.0) - x0).norm() == 0.0);
  const double abar_t = 0.4;
  const Eigen::VectorXd pure =
      forward_noise(x0, Eigen::VectorXd::Zero(dim), abar_t);
  CHECK((pure - std::sqrt(abar_t) * x0).norm() < 1e-12);

  // E ||x_t||^2 with x0 = 0 is (1 - abar_t) * dim.
  double sq = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Eigen::VectorXd e(dim);
    for (int j = 0; j < dim; ++j) e[j] = rng.normal();
    sq += forward_noise(Eigen::VectorXd::Zero(dim), e, abar_t).squaredNorm();
  }
  const double want = (1.0 - abar_t) * dim;
  CHECK(std::abs(sq / draws - want) / want < 0.05);
}

TEST_CASE("ddim_step identity when abar values match") {
  Rng rng(5);
  Eigen::VectorXd x(6), eps(6);
  for (int i = 0; i < 6; ++i) {
    x[i] = rng.normal();
    eps[i] = rng.normal();
  }
  for (double abar : {1.0, 0.5, 0.037}) {
    const Eigen::VectorXd same = ddim_step(x, eps, abar, abar);
    CHECK((same - x).cwiseAbs().maxCoeff() == 0.0);  // exact, bit for bit
  }
}

TEST_CASE("ddim_step inverts forward_noise given the true noise") {
  Rng rng(7);
  Eigen::VectorXd x0(12), eps(12);
  for (int i = 0; i < 12; ++i) {
    x0[i] = rng.uniform(-1.0, 1.0);
    eps[i] = rng.normal();
  }
  const double abar_t = 0.3, abar_prev = 0.8;
  const Eigen::VectorXd x_t = forward_noise(x0, eps, abar_t);
  const Eigen::VectorXd stepped = ddim_step(x_t, eps, abar_t, abar_prev);
  const Eigen::VectorXd want = forward_noise(x0, eps, abar_prev);
  CHECK((stepped - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("oracle-denoiser chain recovers x0") {
  Rng rng(11);
  const auto abar = make_noise_schedule(100);
  Eigen::VectorXd x0(12), eps(12);
  for (int i = 0; i < 12; ++i) {
    x0[i] = rng.uniform(-1.0, 1.0);
    eps[i] = rng.normal();
  }
  const Eigen::VectorXd x_T = forward_noise(x0, eps, abar[100]);
  const Eigen::VectorXd rec = ddim_chain(
      x_T, abar, 10, [&](const Eigen::VectorXd&, int) { return eps; });
  CHECK((rec - x0).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("ddim strides descend from T to 0") {
  const auto ts = ddim_strides(100, 10);
  REQUIRE(ts.size() == 11);
  CHECK(ts.front() == 100);
  CHECK(ts.back() == 0);
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] < ts[i - 1]);
}

TEST_CASE("normalization round-trips in-range values") {
  CHECK(normalize_value(0.5, 0.0, 1.0) == doctest::Approx(0.0));
  CHECK(denormalize_value(normalize_value(0.37, -1.2, 3.4), -1.2, 3.4) ==
        doctest::Approx(0.37).epsilon(1e-9));
  // Degenerate dimensions collapse to zero and restore the constant.
  CHECK(normalize_value(2.0, 2.0, 2.0) == 0.0);
  CHECK(denormalize_value(0.0, 2.0, 2.0) == 2.0);
}

TEST_CASE("time embedding is bounded and distinguishes steps") {
  std::array<double, 32> a{}, b{};
  time_embedding(7, 32, a.data());
  time_embedding(8, 32, b.data());
  bool differs = false;
  for (int i = 0; i < 32; ++i) {
    CHECK(std::abs(a[i]) <= 1.0 + 1e-12);
    differs |= a[i] != b[i];
  }
  CHECK(differs);
}

namespace {

Dataset tiny_dataset(std::uint64_t seed = 21) {
  GenSpec spec;
  spec.paradigm = Paradigm::kStatic;
  spec.sampling = Sampling::kDenseUniform;
  spec.budget = 1200;
  spec.level = RandomizationLevel::kObjectOnly;
  spec.seed = seed;
  return build_dataset(WorldConfig{}, MotionParams{}, DatagenConfig{}, spec);
}

Dataset single_trajectory_dataset() {
  Dataset ds = tiny_dataset(33);
  ds.trajectories.resize(1);
  ds.total_timesteps = ds.trajectories[0].length();
  return ds;
}

}  // namespace

TEST_CASE("normalization stats cover the training data") {
  const Dataset ds = tiny_dataset();
  const NormStats stats = compute_norm_stats(ds);
  for (const Trajectory& t : ds.trajectories) {
    for (const Observation& o : t.observations) {
      for (int d = 0; d < kObservationDim; ++d) {
        const double n = normalize_value(o[d], stats.obs_min[d], stats.obs_max[d]);
        CHECK(n >= -1.0 - 1e-9);
        CHECK(n <= 1.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("diffusion training overfits a single sample") {
  const Dataset ds = single_trajectory_dataset();
  PolicyConfig cfg;
  cfg.train_steps = 6000;
  cfg.learning_rate = 1e-3;
  TrainOptions opts;
  opts.seed = 4;
  double last_loss = 1.0;
  opts.log_every = 100;
  opts.on_log = [&](int, double loss) { last_loss = loss; };
  train_policy(ds, cfg, opts);
  CHECK(last_loss < 0.05);
}

TEST_CASE("bc training overfits a single sample to near zero") {
  Dataset ds = single_trajectory_dataset();
  PolicyConfig cfg;
  cfg.arch = "bc";
  cfg.train_steps = 12000;
  cfg.learning_rate = 1e-3;
  TrainOptions opts;
  opts.seed = 4;
  double last_loss = 1.0;
  opts.log_every = 100;
  opts.on_log = [&](int, double loss) { last_loss = loss; };
  const Policy pol = train_policy(ds, cfg, opts);
  CHECK(last_loss < 2e-3);

  // The overfit policy replays its own demonstration.
  const Trajectory& t = ds.trajectories[0];
  const RolloutResult r = rollout(pol, WorldConfig{}, t.config, 600, 5);
  CHECK(r.score == 3);
}

TEST_CASE("training is deterministic") {
  const Dataset ds = tiny_dataset();
  PolicyConfig cfg;
  cfg.train_steps = 300;
  TrainOptions opts;
  opts.seed = 17;
  const Policy a = train_policy(ds, cfg, opts);
  const Policy b = train_policy(ds, cfg, opts);
  CHECK(serialize_policy(a) == serialize_policy(b));
}

TEST_CASE("sampled chunks are clamped, sized, and seed-deterministic") {
  const Dataset ds = tiny_dataset();
  PolicyConfig cfg;
  cfg.train_steps = 200;
  TrainOptions opts;
  opts.seed = 2;
  const Policy pol = train_policy(ds, cfg, opts);

  std::vector<Observation> history(cfg.observation_horizon,
                                   ds.trajectories[0].observations[0]);
  Rng r1(99), r2(99);
  const auto c1 = pol.sample_chunk(history, r1);
  const auto c2 = pol.sample_chunk(history, r2);
  REQUIRE(c1.size() == static_cast<std::size_t>(cfg.prediction_horizon));
  for (std::size_t i = 0; i < c1.size(); ++i) {
    CHECK(c1[i].vx == c2[i].vx);
    CHECK(c1[i].vy == c2[i].vy);
    CHECK(c1[i].grasp == c2[i].grasp);
    CHECK(c1[i].vx >= -1.0);
    CHECK(c1[i].vx <= 1.0);
    CHECK(c1[i].vy >= -1.0);
    CHECK(c1[i].vy <= 1.0);
    CHECK(c1[i].grasp >= 0.0);
    CHECK(c1[i].grasp <= 1.0);
  }

  std::vector<Observation> wrong(cfg.observation_horizon + 1,
                                 ds.trajectories[0].observations[0]);
  Rng r3(1);
  CHECK_THROWS(pol.sample_chunk(wrong, r3));
}

TEST_CASE("checkpoints round-trip bit-exact and reject corruption") {
  const Dataset ds = tiny_dataset();
  PolicyConfig cfg;
  cfg.train_steps = 150;
  TrainOptions opts;
  opts.seed = 8;
  const Policy pol = train_policy(ds, cfg, opts);
  const std::string bytes = serialize_policy(pol);

  const Policy back = parse_policy(bytes);
  CHECK(serialize_policy(back) == bytes);

  const auto path =
      (std::filesystem::temp_directory_path() / "movebench_pol_test.ckpt")
          .string();
  save_policy(pol, path);
  const Policy from_disk = load_policy(path);
  CHECK(serialize_policy(from_disk) == bytes);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(parse_policy(bytes.substr(0, bytes.size() - 3)), FormatError);
  std::string bad = bytes;
  bad[bytes.size() / 2] ^= 0x20;
  CHECK_THROWS_AS(parse_policy(bad), FormatError);
}

TEST_CASE("rollout executes action_horizon actions per replan") {
  // max_steps 0 terminates immediately with an empty event log.
  const Dataset ds = tiny_dataset();
  PolicyConfig cfg;
  cfg.train_steps = 100;
  TrainOptions opts;
  opts.seed = 3;
  const Policy pol = train_policy(ds, cfg, opts);
  const RolloutResult r =
      rollout(pol, WorldConfig{}, ds.trajectories[0].config, 0, 1);
  CHECK(r.score == 0);
  CHECK(r.steps == 0);

  const RolloutResult a =
      rollout(pol, WorldConfig{}, ds.trajectories[0].config, 50, 7);
  const RolloutResult b =
      rollout(pol, WorldConfig{}, ds.trajectories[0].config, 50, 7);
  CHECK(a.score == b.score);
  CHECK(a.steps == b.steps);
}
