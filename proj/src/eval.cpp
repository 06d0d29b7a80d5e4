#include "movebench/eval.h"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <thread>

#include "movebench/expert.h"
#include "movebench/io.h"

namespace movebench {
namespace {

using nlohmann::json;

class PolicyAgent : public Agent {
 public:
  explicit PolicyAgent(const Policy& policy) : policy_(policy), rng_(0) {}

  void reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    history_.clear();
    queue_.clear();
  }

  Action act(const WorldConfig& cfg, const WorldState& state) override {
    const Observation obs = observe(cfg, state);
    if (history_.empty()) {
      history_.assign(policy_.cfg.observation_horizon, obs);
    } else {
      history_.erase(history_.begin());
      history_.push_back(obs);
    }
    if (queue_.empty()) {
      const std::vector<Action> chunk = policy_.sample_chunk(history_, rng_);
      queue_.assign(chunk.begin(),
                    chunk.begin() + policy_.cfg.action_horizon);
    }
    const Action a = queue_.front();
    queue_.erase(queue_.begin());
    return a;
  }

 private:
  const Policy& policy_;
  Rng rng_;
  std::vector<Observation> history_;
  std::vector<Action> queue_;
};

class ExpertAgent : public Agent {
 public:
  ExpertAgent(const MotionParams& params, double lead_time)
      : params_(params), lead_time_(lead_time) {}
  void reset(std::uint64_t) override {}
  Action act(const WorldConfig& cfg, const WorldState& state) override {
    return expert_action(cfg, params_, AugmentationSchedule::none(), state,
                         lead_time_);
  }

 private:
  MotionParams params_;
  double lead_time_;
};

class RandomAgent : public Agent {
 public:
  RandomAgent() : rng_(0) {}
  void reset(std::uint64_t seed) override { rng_ = Rng(seed); }
  Action act(const WorldConfig&, const WorldState&) override {
    return {rng_.uniform(-1.0, 1.0), rng_.uniform(-1.0, 1.0),
            rng_.uniform(0.0, 1.0)};
  }

 private:
  Rng rng_;
};

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i; (i = next.fetch_add(1)) < n;) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int run_eval_episode(Agent& agent, const WorldConfig& world,
                     const SpatialConfig& config, int max_steps,
                     std::uint64_t agent_seed) {
  agent.reset(agent_seed);
  const AugmentationSchedule none = AugmentationSchedule::none();
  const MotionParams params;
  WorldState st = make_world(world, config, MotionInit::zero());
  while (st.phase != Phase::kDone && st.step_count < max_steps) {
    step(world, none, params, st, agent.act(world, st));
  }
  return score_episode(st.events);
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / xs.size();
}

double std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / xs.size());
}

}  // namespace

AgentFactory policy_agent(const Policy& policy) {
  return [&policy] { return std::make_unique<PolicyAgent>(policy); };
}

AgentFactory expert_agent(const MotionParams& params, double lead_time) {
  return [params, lead_time] {
    return std::make_unique<ExpertAgent>(params, lead_time);
  };
}

AgentFactory random_agent() {
  return [] { return std::make_unique<RandomAgent>(); };
}

EvalReport eval_grid(const AgentFactory& make_agent, const WorldConfig& world,
                     const EvalConfig& cfg) {
  if (cfg.resolution < 2) {
    throw std::invalid_argument("eval_grid: resolution must be >= 2");
  }
  if (cfg.episodes_per_cell < 1) {
    throw std::invalid_argument("eval_grid: episodes_per_cell must be >= 1");
  }
  const int R = cfg.resolution;
  const int max_steps = cfg.max_steps > 0 ? cfg.max_steps : world.step_limit;

  EvalReport report;
  report.resolution = R;
  report.lo = -world.workspace_half;
  report.hi = world.workspace_half;
  report.episodes_per_cell = cfg.episodes_per_cell;
  report.level = cfg.level;
  report.seed = cfg.seed;
  report.cells.resize(static_cast<std::size_t>(R) * R);

  const double span = report.hi - report.lo;
  std::vector<std::array<int, 4>> buckets(report.cells.size(), {0, 0, 0, 0});
  parallel_for(R * R, cfg.jobs, [&](int c) {
    const int ix = c % R;
    const int iy = c / R;
    CellResult cell;
    cell.x = report.lo + (ix + 0.5) * span / R;
    cell.y = report.lo + (iy + 0.5) * span / R;
    const std::uint64_t cell_seed =
        split_seed(cfg.seed, static_cast<std::uint64_t>(c));
    std::unique_ptr<Agent> agent = make_agent();
    for (int e = 0; e < cfg.episodes_per_cell; ++e) {
      const std::uint64_t ep_seed =
          split_seed(cell_seed, static_cast<std::uint64_t>(e));
      Rng rng(split_seed(ep_seed, 0));
      SpatialConfig sc;
      sc.object_pos = {cell.x, cell.y};
      sc.object_heading =
          wrap_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));
      randomize_upper_factors(world, cfg.level, sc.object_pos, rng, sc);
      const int score = run_eval_episode(*agent, world, sc, max_steps,
                                         split_seed(ep_seed, 1));
      ++cell.attempts;
      cell.total_score += score;
      if (score == 3) ++cell.successes;
      ++buckets[c][score];
    }
    report.cells[c] = cell;
  });

  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    const CellResult& cell = report.cells[c];
    report.attempts += cell.attempts;
    report.successes += cell.successes;
    report.total_score += cell.total_score;
    for (int s = 0; s < 4; ++s) report.score_counts[s] += buckets[c][s];
  }
  report.success_rate =
      report.attempts > 0
          ? static_cast<double>(report.successes) / report.attempts
          : 0.0;
  return report;
}

EvalReport eval_policy_grid(const Policy& policy, const WorldConfig& world,
                            const EvalConfig& cfg) {
  EvalReport report = eval_grid(policy_agent(policy), world, cfg);
  // Hash everything but the checkpoint's own CRC trailer: the CRC of a
  // self-checksummed string is the same constant for every valid checkpoint.
  const std::string bytes = serialize_policy(policy);
  report.policy_digest = crc32_hex(
      std::string_view(bytes).substr(0, bytes.size() - 4));
  report.dataset_digest = policy.dataset_digest;
  return report;
}

double normalized_score(const EvalReport& report) {
  if (report.attempts < 1) {
    throw std::invalid_argument("normalized_score: zero attempts");
  }
  return report.total_score / (3.0 * report.attempts);
}

double partition_success(const EvalReport& report,
                         const std::function<bool(const CellResult&)>& keep) {
  int attempts = 0, successes = 0;
  for (const CellResult& cell : report.cells) {
    if (!keep(cell)) continue;
    attempts += cell.attempts;
    successes += cell.successes;
  }
  if (attempts < 1) {
    throw std::invalid_argument("partition_success: empty partition");
  }
  return static_cast<double>(successes) / attempts;
}

void write_report(const EvalReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);

  std::string csv = "x,y,attempts,successes,score\n";
  for (const CellResult& cell : report.cells) {
    csv += format_g9(cell.x);
    csv += ',';
    csv += format_g9(cell.y);
    csv += ',';
    csv += std::to_string(cell.attempts);
    csv += ',';
    csv += std::to_string(cell.successes);
    csv += ',';
    csv += std::to_string(cell.total_score);
    csv += '\n';
  }
  write_file(dir + "/cells.csv", csv);

  json summary;
  summary["resolution"] = report.resolution;
  summary["lo"] = report.lo;
  summary["hi"] = report.hi;
  summary["episodes_per_cell"] = report.episodes_per_cell;
  summary["level"] = static_cast<int>(report.level);
  summary["seed"] = report.seed;
  summary["attempts"] = report.attempts;
  summary["successes"] = report.successes;
  summary["total_score"] = report.total_score;
  summary["success_rate"] = report.success_rate;
  summary["normalized_score"] = normalized_score(report);
  summary["score_counts"] = report.score_counts;
  summary["policy_digest"] = report.policy_digest;
  summary["dataset_digest"] = report.dataset_digest;
  write_file(dir + "/summary.json", summary.dump(2) + "\n");

  // Top image row = max-y grid row so the picture matches the workspace.
  const int R = report.resolution;
  std::string pgm = "P2\n" + std::to_string(R) + " " + std::to_string(R) +
                    "\n255\n";
  for (int iy = R - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < R; ++ix) {
      const CellResult& cell = report.cells[iy * R + ix];
      const int v = cell.attempts > 0
                        ? static_cast<int>(std::lround(
                              255.0 * cell.successes / cell.attempts))
                        : 0;
      pgm += std::to_string(v);
      pgm += (ix + 1 < R) ? ' ' : '\n';
    }
  }
  write_file(dir + "/heatmap.pgm", pgm);
}

namespace {

struct ArmSpec {
  std::string name;
  Paradigm paradigm = Paradigm::kStatic;
  Sampling sampling = Sampling::kDenseUniform;
  RandomizationLevel level = RandomizationLevel::kObjectOnly;
  std::optional<AugmentationSchedule> schedule_override;
  double vmax_scale = 1.0;
};

std::vector<ArmSpec> arms_for(const std::string& experiment) {
  using RL = RandomizationLevel;
  std::vector<ArmSpec> arms;
  if (experiment == "sparse9") {
    arms.push_back({"static", Paradigm::kStatic, Sampling::kSparse9, RL::kObjectOnly});
    arms.push_back({"move", Paradigm::kMove, Sampling::kSparse9, RL::kObjectOnly});
  } else if (experiment == "dense") {
    arms.push_back({"static", Paradigm::kStatic, Sampling::kDenseUniform, RL::kObjectOnly});
    arms.push_back({"move", Paradigm::kMove, Sampling::kDenseUniform, RL::kObjectOnly});
  } else if (experiment == "circle") {
    arms.push_back({"static", Paradigm::kStatic, Sampling::kCircle, RL::kObjectOnly});
    arms.push_back({"move", Paradigm::kMove, Sampling::kCircle, RL::kObjectOnly});
  } else if (experiment == "ladder") {
    arms.push_back({"static-L1", Paradigm::kStatic, Sampling::kDenseUniform, RL::kObjectOnly});
    arms.push_back({"static-L2", Paradigm::kStatic, Sampling::kDenseUniform, RL::kObjectTarget});
    arms.push_back({"static-L3", Paradigm::kStatic, Sampling::kDenseUniform, RL::kObjectTargetCamera});
  } else if (experiment == "dims") {
    AugmentationSchedule vm;
    vm.pick_object_translation = true;
    AugmentationSchedule vo = vm;
    vo.place_target_translation = true;
    AugmentationSchedule vc = vo;
    vc.pick_camera = true;
    vc.place_camera = true;
    AugmentationSchedule wt = vc;
    wt.pick_object_rotation = true;
    arms.push_back({"Vm", Paradigm::kMove, Sampling::kDenseUniform,
                    RL::kObjectTargetCamera, vm});
    arms.push_back({"+Vo", Paradigm::kMove, Sampling::kDenseUniform,
                    RL::kObjectTargetCamera, vo});
    arms.push_back({"+Vc", Paradigm::kMove, Sampling::kDenseUniform,
                    RL::kObjectTargetCamera, vc});
    arms.push_back({"+wtheta", Paradigm::kMove, Sampling::kDenseUniform,
                    RL::kObjectTargetCamera, wt});
  } else if (experiment == "vmax") {
    for (double scale : {0.5, 1.0, 2.0, 4.0}) {
      ArmSpec arm{"vmax-" + format_g9(scale) + "x", Paradigm::kMove,
                  Sampling::kDenseUniform, RL::kObjectTargetCamera};
      arm.vmax_scale = scale;
      arms.push_back(arm);
    }
  } else if (experiment == "triple") {
    arms.push_back({"static", Paradigm::kStatic, Sampling::kDenseUniform,
                    RL::kObjectTargetCamera});
    arms.push_back({"adc", Paradigm::kAdc, Sampling::kDenseUniform,
                    RL::kObjectTargetCamera});
    arms.push_back({"move", Paradigm::kMove, Sampling::kDenseUniform,
                    RL::kObjectTargetCamera});
  } else {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
  return arms;
}

}  // namespace

ComparisonReport run_comparison(const ComparisonOptions& opts) {
  if (opts.seeds.empty()) {
    throw std::invalid_argument("run_comparison: need at least one seed");
  }
  const std::vector<ArmSpec> specs = arms_for(opts.experiment);

  ComparisonReport report;
  report.experiment = opts.experiment;
  report.budget = opts.budget;
  report.seeds = opts.seeds;

  for (const ArmSpec& spec : specs) {
    ArmSummary arm;
    arm.name = spec.name;
    MotionParams motion = opts.motion;
    motion.v_max *= spec.vmax_scale;
    for (std::uint64_t seed : opts.seeds) {
      try {
        GenSpec gs;
        gs.paradigm = spec.paradigm;
        gs.sampling = spec.sampling;
        gs.budget = opts.budget;
        gs.level = spec.level;
        gs.seed = split_seed(seed, 1);
        gs.schedule_override = spec.schedule_override;
        const Dataset ds = build_dataset(opts.world, motion, opts.gen, gs);

        TrainOptions topt;
        topt.seed = split_seed(seed, 2);
        const Policy policy = train_policy(ds, opts.policy, topt);

        EvalConfig ec;
        ec.resolution = opts.resolution;
        ec.episodes_per_cell = opts.episodes_per_cell;
        ec.level = spec.level;
        ec.seed = split_seed(seed, 3);
        ec.jobs = opts.jobs;
        const EvalReport er = eval_policy_grid(policy, opts.world, ec);

        arm.success_by_seed.push_back(er.success_rate);
        arm.score_by_seed.push_back(normalized_score(er));
        arm.budget_by_seed.push_back(ds.total_timesteps);
        if (opts.experiment == "circle") {
          const double r = opts.gen.circle_radius;
          arm.in_success_by_seed.push_back(
              partition_success(er, [r](const CellResult& c) {
                return std::hypot(c.x, c.y) <= r;
              }));
          arm.out_success_by_seed.push_back(
              partition_success(er, [r](const CellResult& c) {
                return std::hypot(c.x, c.y) > r;
              }));
        }
        if (!opts.out_dir.empty()) {
          write_report(er, opts.out_dir + "/" + spec.name + "/seed-" +
                               std::to_string(seed));
        }
      } catch (const std::exception& e) {
        arm.failed = true;
        arm.error = e.what();
        break;
      }
    }
    arm.mean_success = mean_of(arm.success_by_seed);
    arm.std_success = std_of(arm.success_by_seed);
    arm.mean_score = mean_of(arm.score_by_seed);
    arm.std_score = std_of(arm.score_by_seed);
    arm.mean_in_success = mean_of(arm.in_success_by_seed);
    arm.mean_out_success = mean_of(arm.out_success_by_seed);
    report.arms.push_back(std::move(arm));
  }

  // The paradigm-fairness rule: every arm consumed close to the same budget.
  std::int64_t lo = -1, hi = -1;
  for (const ArmSummary& arm : report.arms) {
    for (std::int64_t b : arm.budget_by_seed) {
      lo = lo < 0 ? b : std::min(lo, b);
      hi = hi < 0 ? b : std::max(hi, b);
    }
  }
  if (lo > 0 && static_cast<double>(hi - lo) / lo > 0.10) {
    throw GenerationError("comparison arms consumed budgets >10% apart");
  }

  if (!opts.out_dir.empty()) write_comparison(report, opts.out_dir);
  return report;
}

void write_comparison(const ComparisonReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  json j;
  j["experiment"] = report.experiment;
  j["budget"] = report.budget;
  j["seeds"] = report.seeds;
  j["arms"] = json::array();
  for (const ArmSummary& arm : report.arms) {
    json a;
    a["name"] = arm.name;
    a["failed"] = arm.failed;
    if (arm.failed) a["error"] = arm.error;
    a["success_by_seed"] = arm.success_by_seed;
    a["score_by_seed"] = arm.score_by_seed;
    a["budget_by_seed"] = arm.budget_by_seed;
    a["mean_success"] = arm.mean_success;
    a["std_success"] = arm.std_success;
    a["mean_score"] = arm.mean_score;
    a["std_score"] = arm.std_score;
    if (!arm.in_success_by_seed.empty()) {
      a["in_success_by_seed"] = arm.in_success_by_seed;
      a["out_success_by_seed"] = arm.out_success_by_seed;
      a["mean_in_success"] = arm.mean_in_success;
      a["mean_out_success"] = arm.mean_out_success;
    }
    j["arms"].push_back(a);
  }
  write_file(dir + "/comparison.json", j.dump(2) + "\n");
}

}  // namespace movebench
