#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "movebench/config.h"

using namespace movebench;

TEST_CASE("apply_override reaches every section") {
  AppConfig cfg;
  apply_override(cfg, "world.grasp_radius", "0.04");
  apply_override(cfg, "motion.v_max", "0.1");
  apply_override(cfg, "gen.adc_reset_period", "25");
  apply_override(cfg, "policy.train_steps", "123");
  apply_override(cfg, "policy.arch", "bc");
  apply_override(cfg, "eval.resolution", "7");
  CHECK(cfg.world.grasp_radius == 0.04);
  CHECK(cfg.motion.v_max == 0.1);
  CHECK(cfg.gen.adc_reset_period == 25);
  CHECK(cfg.policy.train_steps == 123);
  CHECK(cfg.policy.arch == "bc");
  CHECK(cfg.eval_resolution == 7);
}

TEST_CASE("hidden widths parse as a comma list") {
  AppConfig cfg;
  apply_override(cfg, "policy.hidden", "64,32,16");
  REQUIRE(cfg.policy.hidden.size() == 3);
  CHECK(cfg.policy.hidden[0] == 64);
  CHECK(cfg.policy.hidden[1] == 32);
  CHECK(cfg.policy.hidden[2] == 16);
  CHECK_THROWS_AS(apply_override(cfg, "policy.hidden", "64,x"), ConfigError);
}

TEST_CASE("bad keys and values throw ConfigError") {
  AppConfig cfg;
  CHECK_THROWS_AS(apply_override(cfg, "world.no_such_knob", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "grasp_radius", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "world.grasp_radius", "wide"),
                  ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "world.step_limit", "3.5"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "policy.arch", "transformer"),
                  ConfigError);
  CHECK(cfg.world.grasp_radius == WorldConfig{}.grasp_radius);
}

TEST_CASE("config files allow comments, blanks, and later-wins") {
  const auto path =
      std::filesystem::temp_directory_path() / "movebench_cfg_test.cfg";
  {
    std::ofstream f(path);
    f << "# tuning notes\n"
      << "\n"
      << "motion.v_max = 0.08\n"
      << "  policy.train_steps=500   \n"
      << "motion.v_max = 0.09  # later assignment wins\n";
  }
  AppConfig cfg;
  load_config_file(cfg, path.string());
  CHECK(cfg.motion.v_max == 0.09);
  CHECK(cfg.policy.train_steps == 500);
  std::filesystem::remove(path);

  AppConfig other;
  CHECK_THROWS_AS(load_config_file(other, "/nonexistent/movebench.cfg"),
                  ConfigError);
}

TEST_CASE("dump_config echoes a loadable snapshot") {
  AppConfig cfg;
  apply_override(cfg, "motion.v_max", "0.123");
  apply_override(cfg, "policy.hidden", "31,17");
  const std::string dump = dump_config(cfg);
  CHECK(dump.find("motion.v_max") != std::string::npos);
  CHECK(dump.find("policy.hidden = 31,17") != std::string::npos);

  // Round-trip: feeding the dump back reproduces the config.
  const auto path =
      std::filesystem::temp_directory_path() / "movebench_cfg_dump.cfg";
  {
    std::ofstream f(path);
    f << dump;
  }
  AppConfig back;
  load_config_file(back, path.string());
  CHECK(dump_config(back) == dump);
  std::filesystem::remove(path);

  // Fixed ordering: identical configs dump identically, and world keys
  // come before policy keys.
  CHECK(dump.find("world.workspace_half") < dump.find("policy.train_steps"));
}
