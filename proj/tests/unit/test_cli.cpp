#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "twinlane/world.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / ("twinlane_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Result cli(const std::string& args) {
  const auto dir = scratch();
  const std::string cmd = std::string(TWINLANE_CLI) + " " + args + " >" + (dir / "stdout").string() + " 2>" +
                          (dir / "stderr").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "stdout"), slurp(dir / "stderr")};
}

fs::path write(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, CourseGenStraight) {
  const auto out = scratch() / "straight.course";
  const Result r = cli("course gen --kind straight --pairs 10 --lane-width 1.0 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const twinlane::Course c = twinlane::load_course(out);
  EXPECT_EQ(c.cones.size(), 20u);
  EXPECT_NO_THROW(twinlane::validate_drivable(c));
}

TEST(Cli, CourseGenToStdout) {
  const Result r = cli("course gen --kind slalom --pairs 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(twinlane::parse_course(r.out).cones.size(), 8u);
}

TEST(Cli, MissingConfigNamesPath) {
  const Result r = cli("run --config /nonexistent/missing.yaml");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("/nonexistent/missing.yaml"), std::string::npos) << r.err;
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"]["category"], "config");
}

TEST(Cli, UnknownKeyReportsPath) {
  const auto cfg = write("bad.yaml", "vehicle: {masss: 10}\n");
  const Result r = cli("run --config " + cfg.string());
  EXPECT_EQ(r.code, 1);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"]["path"], "vehicle.masss");
}

TEST(Cli, InvalidFlagsExitTwo) {
  EXPECT_EQ(cli("run --no-such-flag").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("gap --config x.yaml").code, 2);
  EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, RunWritesArtifactsAndReplayAgrees) {
  const auto cfg = write("short.yaml", "duration: 3.0\n");
  const auto out = scratch() / "run";
  const Result r = cli("run --config " + cfg.string() + " --seed 5 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"log.json", "run.csv", "plan.csv", "metrics.json"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  const auto metrics = nlohmann::json::parse(slurp(out / "metrics.json"));
  EXPECT_EQ(nlohmann::json::parse(r.out), metrics);
  EXPECT_EQ(nlohmann::json::parse(slurp(out / "log.json"))["seed"], 5);

  const Result replay = cli("replay --log " + (out / "log.json").string());
  ASSERT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(nlohmann::json::parse(replay.out), metrics);
}

TEST(Cli, GapWithPerturbationIsFinite) {
  const auto base = write("base.yaml", "duration: 3.0\n");
  const auto heavy = write("heavy.yaml", "perturbation: {param_scales: {motor_stall_torque: 1.3}, actuation_delay_steps: 1}\n");
  const Result r = cli("gap --config " + base.string() + " --perturb " + heavy.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto g = nlohmann::json::parse(r.out);
  for (const char* k : {"pose_rmse", "pose_max_divergence", "heading_rmse"}) {
    ASSERT_TRUE(g[k].is_number()) << k;
    EXPECT_TRUE(std::isfinite(g[k].get<double>()));
  }
  for (const auto& [k, v] : g["input_rmse"].items()) EXPECT_TRUE(std::isfinite(v.get<double>())) << k;
  for (const auto& [k, v] : g["metric_deltas"].items()) EXPECT_TRUE(std::isfinite(v.get<double>())) << k;
  EXPECT_GT(g["pose_rmse"].get<double>(), 0.0);
}

TEST(Cli, ReplayMissingLog) {
  const Result r = cli("replay --log /nonexistent/log.json");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["category"], "io");
}
