// twinlane command-line front end: run, gap, course gen, replay, stack.
#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "twinlane/harness/config.hpp"
#include "twinlane/harness/course_gen.hpp"
#include "twinlane/harness/episode.hpp"
#include "twinlane/harness/export.hpp"
#include "twinlane/harness/logging.hpp"
#include "twinlane/harness/metrics.hpp"

namespace fs = std::filesystem;
using namespace twinlane;
using namespace twinlane::harness;

namespace {

struct ScenarioArgs {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> transport;
};

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& args) {
  cmd->add_option("--config", args.configs, "Config overlay file (repeatable, applied in order)");
  cmd->add_option("--seed", args.seed, "Override the scenario seed");
  cmd->add_option("--transport", args.transport, "in_process or tcp")->check(CLI::IsMember({"in_process", "tcp"}));
}

Json overrides_from(const ScenarioArgs& args) {
  Json o = Json::object();
  if (args.seed) o["seed"] = *args.seed;
  if (args.transport) o["transport"] = {{"mode", *args.transport}};
  return o;
}

ScenarioConfig scenario_from(const ScenarioArgs& args, const std::vector<std::string>& extra = {}) {
  std::vector<fs::path> files(args.configs.begin(), args.configs.end());
  files.insert(files.end(), extra.begin(), extra.end());
  return load_scenario(files, overrides_from(args));
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

int report_error(const char* category, const std::string& message) {
  const Json err = {{"error", {{"category", category}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();

  CLI::App app{"twinlane: scale-vehicle simulator, cone-lane stack and sim-to-real gap harness"};
  app.require_subcommand(1);

  ScenarioArgs run_args;
  std::string run_out = "twinlane-run";
  auto* run = app.add_subcommand("run", "Run one closed-loop episode; writes log.json, run.csv, plan.csv, metrics.json");
  add_scenario_flags(run, run_args);
  run->add_option("--out", run_out, "Output directory");

  ScenarioArgs gap_args;
  std::vector<std::string> perturb_files, proxy_files;
  std::string gap_out;
  auto* gap = app.add_subcommand("gap", "Compare a nominal run against a perturbed or second-config run");
  add_scenario_flags(gap, gap_args);
  auto* perturb_opt = gap->add_option("--perturb", perturb_files, "Overlay applied on top of --config for the proxy run");
  auto* proxy_opt = gap->add_option("--proxy-config", proxy_files, "Standalone config for the proxy run (repeatable)");
  perturb_opt->excludes(proxy_opt);
  gap->add_option("--out", gap_out, "GapReport JSON file (stdout when omitted)");

  auto* course = app.add_subcommand("course", "Course utilities");
  course->require_subcommand(1);
  CourseSpec spec;
  std::string course_out;
  auto* gen = course->add_subcommand("gen", "Generate a straight, slalom or arc course");
  gen->add_option("--kind", spec.kind, "straight | slalom | arc")->check(CLI::IsMember({"straight", "slalom", "arc"}));
  gen->add_option("--pairs", spec.pairs, "Number of cone pairs");
  gen->add_option("--lane-width", spec.lane_width, "Lane width (m)");
  gen->add_option("--spacing", spec.spacing, "Pair spacing along the centreline (m)");
  gen->add_option("--amplitude", spec.amplitude, "Slalom amplitude (m)");
  gen->add_option("--period", spec.period, "Slalom period (m)");
  gen->add_option("--radius", spec.radius, "Arc radius (m)");
  gen->add_option("--out", course_out, "Course file (stdout when omitted)");

  std::string replay_log, replay_out;
  auto* replay = app.add_subcommand("replay", "Recompute metrics from a stored run log");
  replay->add_option("--log", replay_log, "log.json written by `run`")->required();
  replay->add_option("--out", replay_out, "Metrics JSON file (stdout when omitted)");

  ScenarioArgs stack_args;
  std::string stack_host = "127.0.0.1";
  std::uint16_t stack_port = 7700;
  int stack_timeout = 60;
  auto* stack = app.add_subcommand("stack", "Serve the autonomy stack over TCP for one plant connection");
  stack->add_option("--config", stack_args.configs, "Config overlay file (repeatable)");
  stack->add_option("--host", stack_host, "Listen address");
  stack->add_option("--port", stack_port, "Listen port");
  stack->add_option("--timeout", stack_timeout, "Seconds to wait for the plant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const ScenarioConfig cfg = scenario_from(run_args);
      const RunLog log = run_episode(cfg);
      const RunMetrics metrics = compute_metrics(log);
      const fs::path dir(run_out);
      fs::create_directories(dir);
      save_run_log(log, dir / "log.json");
      export_csv(log, dir / "run.csv");
      export_plan_csv(log, dir / "plan.csv");
      save_json(to_json(metrics), dir / "metrics.json");
      print_json(to_json(metrics));
    } else if (*gap) {
      if (perturb_files.empty() && proxy_files.empty()) {
        std::cerr << "gap: one of --perturb or --proxy-config is required\n" << gap->help();
        return 2;
      }
      const ScenarioConfig nominal_cfg = scenario_from(gap_args);
      ScenarioConfig proxy_cfg;
      if (!perturb_files.empty()) {
        proxy_cfg = scenario_from(gap_args, perturb_files);
      } else {
        ScenarioArgs proxy_args = gap_args;
        proxy_args.configs = proxy_files;
        proxy_cfg = scenario_from(proxy_args);
      }
      const GapReport report = gap_report(run_episode(nominal_cfg), run_episode(proxy_cfg));
      if (gap_out.empty()) {
        print_json(to_json(report));
      } else {
        save_json(to_json(report), gap_out);
      }
    } else if (*gen) {
      const std::string text = format_course(generate_course(spec));
      if (course_out.empty()) {
        std::cout << text;
      } else {
        write_text(course_out, text);
      }
    } else if (*replay) {
      const Json metrics = to_json(compute_metrics(load_run_log(replay_log)));
      if (replay_out.empty()) {
        print_json(metrics);
      } else {
        save_json(metrics, replay_out);
      }
    } else if (*stack) {
      const ScenarioConfig cfg = scenario_from(stack_args);
      serve_stack(stack_config(cfg), stack_host, stack_port, std::chrono::seconds(stack_timeout));
    }
  } catch (const ConfigError& e) {
    const Json err = {{"error", {{"category", e.category()}, {"path", e.path()}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const Error& e) {
    return report_error(e.category(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error("io", e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
