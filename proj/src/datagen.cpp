#include "movebench/datagen.h"

#include <cmath>
#include <numbers>

#include "movebench/io.h"

namespace movebench {
namespace {

double sampled_heading(Rng& rng) {
  return wrap_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));
}

// Designated grid/circle points usable at this level: at level 1 the target
// is pinned, so points violating the separation rule are dropped.
std::vector<Eigen::Vector2d> usable_anchors(const WorldConfig& world,
                                            const DatagenConfig& gen,
                                            Sampling sampling,
                                            RandomizationLevel level) {
  std::vector<Eigen::Vector2d> pts;
  if (sampling == Sampling::kSparse9) {
    pts = sparse9_points();
  } else if (sampling == Sampling::kCircle) {
    pts = circle_points(gen.circle_radius, gen.circle_count);
  } else {
    return pts;
  }
  if (static_cast<int>(level) >= 2) return pts;
  std::vector<Eigen::Vector2d> keep;
  for (const auto& p : pts) {
    if ((p - world.fixed_target).norm() >= world.min_separation) {
      keep.push_back(p);
    }
  }
  if (keep.empty()) throw GenerationError("no usable designated starts");
  return keep;
}

// A start pose for a moving object such that it is predicted to cross the
// designated point right when the gripper arrives there from home.
struct AlignedStart {
  Eigen::Vector2d pos;
  Eigen::Vector2d dir;
  double speed_frac = 0.0;
};

AlignedStart aligned_start(const WorldConfig& world, const MotionParams& motion,
                           const DatagenConfig& gen, Sampling sampling,
                           RandomizationLevel level,
                           const Eigen::Vector2d& anchor, Rng& rng) {
  AlignedStart out;
  out.speed_frac = sample_speed_fraction(motion.alpha_p, motion.beta_p, rng);
  const double speed = out.speed_frac * motion.v_max;
  const double travel =
      std::max(0.0, (anchor - world.gripper_home).norm() - world.grasp_radius);
  const double arrival = travel / world.gripper_speed;
  const Rect ws = world.workspace();
  for (int tries = 0; tries < 200; ++tries) {
    out.dir = sample_direction(rng);
    out.pos = anchor - speed * arrival * out.dir;
    if (!ws.contains(out.pos)) continue;
    if (sampling == Sampling::kCircle && out.pos.norm() > gen.circle_radius) {
      continue;
    }
    if (static_cast<int>(level) < 2 &&
        (out.pos - world.fixed_target).norm() < world.min_separation) {
      continue;
    }
    return out;
  }
  // Give up on backtracking; start on the anchor itself.
  out.pos = anchor;
  return out;
}

EpisodeSetup make_setup(const WorldConfig& world, const MotionParams& motion,
                        const DatagenConfig& gen, const GenSpec& spec,
                        const AugmentationSchedule& schedule,
                        const std::vector<Eigen::Vector2d>& anchors, int index,
                        Rng& rng) {
  EpisodeSetup s;
  s.schedule = schedule;
  if (spec.paradigm == Paradigm::kAdc) s.reset_period = gen.adc_reset_period;

  if (spec.sampling == Sampling::kDenseUniform) {
    s.config = randomize_config(world, spec.level, rng);
    s.motion = spec.paradigm == Paradigm::kMove ? MotionInit::sample(motion, rng)
                                                : MotionInit::zero();
    return s;
  }

  const Eigen::Vector2d anchor = anchors[index % anchors.size()];
  if (spec.paradigm == Paradigm::kMove) {
    const AlignedStart start =
        aligned_start(world, motion, gen, spec.sampling, spec.level, anchor, rng);
    s.config.object_pos = start.pos;
    s.config.object_heading = sampled_heading(rng);
    randomize_upper_factors(world, spec.level, start.pos, rng, s.config);
    s.motion.object_dir = start.dir;
    s.motion.object_speed_frac = start.speed_frac;
    s.motion.object_omega_frac =
        sample_speed_fraction(motion.alpha_theta, motion.beta_theta, rng);
    s.motion.object_spin = rng.sign();
    s.motion.target_dir = sample_direction(rng);
    s.motion.target_speed_frac =
        sample_speed_fraction(motion.alpha_p, motion.beta_p, rng);
    s.motion.camera_speed_frac =
        sample_speed_fraction(motion.alpha_c, motion.beta_c, rng);
    s.motion.camera_dir = rng.sign();
  } else {
    s.config.object_pos = anchor;
    s.config.object_heading = sampled_heading(rng);
    randomize_upper_factors(world, spec.level, anchor, rng, s.config);
    s.motion = MotionInit::zero();
  }
  return s;
}

void quantize_config(SpatialConfig& c) {
  c.object_pos = {quantize_g9(c.object_pos.x()), quantize_g9(c.object_pos.y())};
  c.object_heading = quantize_g9(c.object_heading);
  c.target_pos = {quantize_g9(c.target_pos.x()), quantize_g9(c.target_pos.y())};
  c.camera_angle = quantize_g9(c.camera_angle);
}

// Rounds everything serialized through its text form so the in-memory dataset
// and a written-then-read one are bit-identical.
void quantize_trajectory(Trajectory& t) {
  quantize_config(t.config);
  for (auto& obs : t.observations) {
    for (double& v : obs) v = quantize_g9(v);
  }
  for (auto& act : t.actions) {
    act.vx = quantize_g9(act.vx);
    act.vy = quantize_g9(act.vy);
    act.grasp = quantize_g9(act.grasp);
  }
}

}  // namespace

std::vector<Eigen::Vector2d> sparse9_points() {
  std::vector<Eigen::Vector2d> pts;
  for (double y : {-0.2, 0.0, 0.2}) {
    for (double x : {-0.2, 0.0, 0.2}) {
      pts.push_back({x, y});
    }
  }
  return pts;
}

std::vector<Eigen::Vector2d> circle_points(double radius, int count) {
  if (count < 1) throw std::invalid_argument("circle_points: count < 1");
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double a = 2.0 * std::numbers::pi * i / count;
    pts.push_back({radius * std::cos(a), radius * std::sin(a)});
  }
  return pts;
}

AugmentationSchedule full_schedule() {
  AugmentationSchedule s;
  s.pick_object_translation = true;
  s.pick_object_rotation = true;
  s.pick_camera = true;
  s.place_target_translation = true;
  s.place_camera = true;
  return s;
}

std::string config_digest(const WorldConfig& world, const MotionParams& motion) {
  std::string dump;
  const double fields[] = {world.workspace_half,
                           world.dt,
                           static_cast<double>(world.step_limit),
                           world.grasp_radius,
                           world.place_tolerance,
                           static_cast<double>(world.place_hold_steps),
                           world.gripper_speed,
                           world.handle_offset,
                           world.min_separation,
                           world.fixed_target.x(),
                           world.fixed_target.y(),
                           world.fixed_camera_angle,
                           world.gripper_home.x(),
                           world.gripper_home.y(),
                           motion.v_max,
                           motion.omega_max,
                           motion.u_max,
                           motion.alpha_p,
                           motion.beta_p,
                           motion.alpha_theta,
                           motion.beta_theta,
                           motion.alpha_c,
                           motion.beta_c};
  append_g9_array(dump, fields, std::size(fields));
  return crc32_hex(dump);
}

Dataset build_dataset(const WorldConfig& world, const MotionParams& motion,
                      const DatagenConfig& gen, const GenSpec& spec) {
  motion.validate();
  if (spec.budget < 1) throw std::invalid_argument("budget must be positive");

  // MOVE always runs the full staged augmentation; the level only shapes the
  // initial-config distribution. Ablations narrow the dims via the override.
  const AugmentationSchedule schedule =
      spec.paradigm == Paradigm::kMove
          ? spec.schedule_override.value_or(full_schedule())
          : AugmentationSchedule::none();
  const std::vector<Eigen::Vector2d> anchors =
      usable_anchors(world, gen, spec.sampling, spec.level);

  Dataset ds;
  ds.paradigm = spec.paradigm;
  ds.sampling = spec.sampling;
  ds.budget = spec.budget;
  ds.seed = spec.seed;
  ds.world_config_digest = config_digest(world, motion);

  for (int index = 0;; ++index) {
    if (index >= gen.max_trajectories) {
      throw GenerationError("collection stalled before reaching the budget");
    }
    const std::uint64_t traj_seed =
        split_seed(spec.seed, static_cast<std::uint64_t>(index));
    Rng rng(traj_seed);
    auto setup_fn = [&](Rng& r) {
      return make_setup(world, motion, gen, spec, schedule, anchors, index, r);
    };
    auto collected = collect_episode(world, motion, setup_fn, rng,
                                     gen.lead_time, gen.max_retries);
    if (!collected) {
      ds.stats.attempts += 1 + gen.max_retries;
      ds.stats.failures += 1 + gen.max_retries;
      continue;
    }
    ds.stats.attempts += collected->episodes_rolled;
    ds.stats.failures += collected->episodes_rolled - 1;

    const std::int64_t len =
        static_cast<std::int64_t>(collected->result.observations.size());
    const std::int64_t overshoot = ds.total_timesteps + len - spec.budget;
    if (overshoot >= 0 && 2 * overshoot >= len) {
      // Crossing the budget here would overshoot by at least half this
      // trajectory; ending just under the budget is the smaller error.
      break;
    }

    Trajectory t;
    t.config = collected->setup.config;
    t.schedule = collected->setup.schedule;
    t.observations = std::move(collected->result.observations);
    t.actions = std::move(collected->result.actions);
    t.seed = traj_seed;
    t.paradigm = spec.paradigm;
    quantize_trajectory(t);
    ds.total_timesteps += len;
    ds.trajectories.push_back(std::move(t));
    if (ds.total_timesteps >= spec.budget) break;
  }

  const double rel = static_cast<double>(ds.total_timesteps - spec.budget) /
                     static_cast<double>(spec.budget);
  if (std::abs(rel) > gen.budget_tolerance) {
    throw GenerationError("budget missed by more than the tolerance");
  }
  return ds;
}

}  // namespace movebench
