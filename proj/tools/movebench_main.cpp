#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "movebench/config.h"
#include "movebench/dataset.h"
#include "movebench/datagen.h"
#include "movebench/eval.h"
#include "movebench/io.h"
#include "movebench/policy.h"

namespace {

using namespace movebench;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MOVE_BENCH_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    throw ConfigError(std::string("MOVE_BENCH_SEED is not an integer: '") +
                      env + "'");
  }
  return 1;
}

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "key=value config file (world/motion/policy defaults)");
    cmd->add_option("--set", overrides,
                    "inline key=value override; repeatable, wins over file");
    cmd->add_option("--jobs", jobs, "worker threads for generation/eval");
  }

  AppConfig resolve() const {
    AppConfig cfg;
    if (!config_path.empty()) load_config_file(cfg, config_path);
    for (const std::string& kv : overrides) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("--set expects key=value, got '" + kv + "'");
      }
      apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    std::cout << "# effective config\n" << dump_config(cfg) << std::flush;
    return cfg;
  }
};

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("no such file: " + path);
  }
}

RandomizationLevel parse_level(int level) {
  switch (level) {
    case 1: return RandomizationLevel::kObjectOnly;
    case 2: return RandomizationLevel::kObjectTarget;
    case 3: return RandomizationLevel::kObjectTargetCamera;
    default: throw ConfigError("level must be 1, 2, or 3");
  }
}

int cmd_gen(const Common& common, const std::string& paradigm,
            const std::string& sampling, std::int64_t budget, int level,
            std::uint64_t seed, const std::string& out) {
  const AppConfig cfg = common.resolve();
  GenSpec spec;
  spec.paradigm = paradigm_from_string(paradigm);
  spec.sampling = sampling_from_string(sampling);
  spec.budget = budget;
  spec.level = parse_level(level);
  spec.seed = seed;
  const Dataset ds = build_dataset(cfg.world, cfg.motion, cfg.gen, spec);
  write_dataset(ds, out);
  std::cout << "wrote " << out << ": " << ds.trajectories.size()
            << " trajectories, " << ds.total_timesteps << " timesteps ("
            << ds.stats.failures << " retries discarded)\n";
  return 0;
}

int cmd_train(const Common& common, const std::string& dataset_path,
              const std::string& arch, int steps, std::uint64_t seed,
              const std::string& out) {
  AppConfig cfg = common.resolve();
  cfg.policy.arch = arch;
  if (steps > 0) cfg.policy.train_steps = steps;
  require_file(dataset_path);
  const Dataset ds = read_dataset(dataset_path);
  TrainOptions opts;
  opts.seed = seed;
  opts.log_every = std::max(1, cfg.policy.train_steps / 10);
  opts.on_log = [](int step, double loss) {
    std::cout << "step " << step << " loss " << loss << "\n";
  };
  const Policy policy = train_policy(ds, cfg.policy, opts);
  save_policy(policy, out);
  std::cout << "wrote " << out << ": " << policy.net.param_count()
            << " parameters\n";
  return 0;
}

int cmd_eval(const Common& common, const std::string& checkpoint_path,
             int grid, int episodes, int level, std::uint64_t seed,
             const std::string& out) {
  const AppConfig cfg = common.resolve();
  require_file(checkpoint_path);
  const Policy policy = load_policy(checkpoint_path);
  EvalConfig ec;
  ec.resolution = grid > 0 ? grid : cfg.eval_resolution;
  ec.episodes_per_cell = episodes > 0 ? episodes : cfg.eval_episodes_per_cell;
  ec.level = parse_level(level);
  ec.seed = seed;
  ec.jobs = common.jobs;
  const EvalReport report = eval_policy_grid(policy, cfg.world, ec);
  write_report(report, out);
  std::cout << "wrote " << out << ": success " << report.success_rate
            << ", normalized score " << normalized_score(report) << "\n";
  return 0;
}

int cmd_repro(const Common& common, const std::string& experiment,
              std::int64_t budget, const std::string& seeds_csv,
              const std::string& out) {
  const AppConfig cfg = common.resolve();
  ComparisonOptions opts;
  opts.experiment = experiment;
  opts.budget = budget;
  opts.seeds.clear();
  std::stringstream ss(seeds_csv);
  std::string part;
  while (std::getline(ss, part, ',')) {
    opts.seeds.push_back(std::stoull(part));
  }
  opts.out_dir = out;
  opts.jobs = common.jobs;
  opts.world = cfg.world;
  opts.motion = cfg.motion;
  opts.gen = cfg.gen;
  opts.policy = cfg.policy;
  opts.resolution = cfg.eval_resolution;
  opts.episodes_per_cell = cfg.eval_episodes_per_cell;
  const ComparisonReport report = run_comparison(opts);
  for (const ArmSummary& arm : report.arms) {
    std::cout << arm.name << ": ";
    if (arm.failed) {
      std::cout << "FAILED (" << arm.error << ")\n";
      continue;
    }
    std::cout << "success " << arm.mean_success << " +/- " << arm.std_success
              << ", score " << arm.mean_score << " +/- " << arm.std_score
              << "\n";
  }
  std::cout << "wrote " << out << "/comparison.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale motion-augmentation benchmark"};
  app.require_subcommand(1);

  Common common;
  std::uint64_t seed = 0;

  std::string paradigm = "static", sampling = "dense";
  std::int64_t budget = 20000;
  int level = 1;
  std::string out;
  CLI::App* gen = app.add_subcommand("gen", "generate a dataset");
  gen->add_option("--paradigm", paradigm, "static | adc | move");
  gen->add_option("--sampling", sampling, "sparse9 | dense | circle");
  gen->add_option("--budget", budget, "total timestep budget");
  gen->add_option("--level", level, "randomization level 1|2|3");
  gen->add_option("--seed", seed, "generation seed");
  gen->add_option("--out", out, "dataset file path")->required();
  common.attach(gen);

  std::string dataset_path, arch = "diffusion";
  int steps = 0;
  CLI::App* train = app.add_subcommand("train", "train a policy");
  train->add_option("--dataset", dataset_path, "dataset file")->required();
  train->add_option("--policy", arch, "diffusion | bc");
  train->add_option("--steps", steps, "gradient steps (default from config)");
  train->add_option("--seed", seed, "training seed");
  train->add_option("--out", out, "checkpoint path")->required();
  common.attach(train);

  std::string checkpoint_path;
  int grid = 0, episodes = 0;
  CLI::App* eval_cmd = app.add_subcommand("eval", "grid-evaluate a policy");
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")
      ->required();
  eval_cmd->add_option("--grid", grid, "grid resolution");
  eval_cmd->add_option("--episodes", episodes, "episodes per cell");
  eval_cmd->add_option("--level", level, "randomization level 1|2|3");
  eval_cmd->add_option("--seed", seed, "evaluation seed");
  eval_cmd->add_option("--out", out, "report directory")->required();
  common.attach(eval_cmd);

  std::string experiment, seeds_csv = "1,2,3";
  CLI::App* repro = app.add_subcommand("repro", "run a canned comparison");
  repro->add_option("--experiment", experiment,
                    "sparse9|dense|circle|ladder|dims|vmax|triple")
      ->required();
  repro->add_option("--budget", budget, "per-arm timestep budget");
  repro->add_option("--seeds", seeds_csv, "comma-separated seed list");
  repro->add_option("--out", out, "report directory")->required();
  common.attach(repro);

  try {
    seed = default_seed();  // env fallback; explicit --seed overwrites below
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems exit 2, --help exits 0
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(common, paradigm, sampling, budget, level, seed, out);
    }
    if (train->parsed()) {
      return cmd_train(common, dataset_path, arch, steps, seed, out);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(common, checkpoint_path, grid, episodes, level, seed,
                      out);
    }
    if (repro->parsed()) {
      return cmd_repro(common, experiment, budget, seeds_csv, out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
