#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

#include "nxtbdi/asl/parser.hpp"
#include "nxtbdi/harness/artifacts.hpp"
#include "nxtbdi/harness/scenario.hpp"

namespace {

using namespace nxtbdi;

constexpr int kAllPass = 0;
constexpr int kCriterionFailed = 1;
constexpr int kConfigError = 2;

int print_verdict(const harness::RunVerdict& v) {
  std::cout << v.to_text();
  return v.all_pass() ? kAllPass : kCriterionFailed;
}

int parse_command(const std::string& file) {
  asl::AgentProgram p;
  try {
    p = asl::parse_agent_program(harness::read_file(file));
  } catch (const asl::ParseError& e) {
    std::cerr << file << ":" << e.line() << ":" << e.column() << ": "
              << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  std::cout << "beliefs: " << p.beliefs.size() << "\n";
  for (const auto& b : p.beliefs) std::cout << "  " << to_string(b) << "\n";
  std::cout << "rules: " << p.rules.size() << "\n";
  for (const auto& r : p.rules)
    std::cout << "  " << to_string(r.head) << " :- " << to_string(r.body)
              << "\n";
  std::cout << "goals: " << p.goals.size() << "\n";
  for (const auto& g : p.goals) std::cout << "  !" << to_string(g) << "\n";
  std::cout << "plans: " << p.plans.size() << "\n";
  for (const auto& pl : p.plans) std::cout << "  " << to_string(pl) << "\n";
  return kAllPass;
}

void configure_logging() {
  spdlog::set_default_logger(spdlog::stderr_color_mt("nxtbdi"));
  if (const char* lvl = std::getenv("NXTBDI_LOG"))
    spdlog::set_level(spdlog::level::from_str(lvl));
  else
    spdlog::set_level(spdlog::level::warn);
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"AgentSpeak agents driving simulated NXT robots"};
  app.require_subcommand(1);

  std::string project, world, mode = "async", latency, out;
  std::optional<std::uint64_t> seed;
  std::optional<long long> max_time, ack_timeout;
  long long tick = 10;
  bool free_running = false;
  double time_scale = 10.0;

  auto* run = app.add_subcommand("run", "run a project in a world");
  run->add_option("project", project, "project file (.mas2j)")->required();
  run->add_option("world", world, "world spec file")->required();
  run->add_option("--mode", mode, "bridge mode")
      ->check(CLI::IsMember({"sync", "async"}));
  run->add_option("--seed", seed, "random seed");
  run->add_option("--tick", tick, "simulation tick in ms")
      ->check(CLI::PositiveNumber);
  run->add_option("--latency", latency, "transport latency, e.g. 30+-20");
  run->add_option("--max-time", max_time, "simulated time limit in ms");
  run->add_option("--ack-timeout", ack_timeout, "sync ACK timeout in ms");
  run->add_option("--out", out, "output directory (default $NXTBDI_OUT or out)");
  run->add_flag("--free-running", free_running,
                "one thread per agent and robot");
  run->add_option("--time-scale", time_scale,
                  "free-running: simulated ms per wall ms");

  std::string asl_file;
  auto* parse = app.add_subcommand("parse", "syntax-check an agent program");
  parse->add_option("file", asl_file, "AgentSpeak source")->required();

  std::string trace_dir;
  auto* replay = app.add_subcommand("replay", "recompute a verdict");
  replay->add_option("dir", trace_dir, "output directory of a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kConfigError;
  }

  if (parse->parsed()) return parse_command(asl_file);

  if (replay->parsed()) {
    try {
      return print_verdict(harness::replay(trace_dir));
    } catch (const std::exception& e) {
      std::cerr << "replay: " << e.what() << "\n";
      return kConfigError;
    }
  }

  harness::RunOptions opts;
  try {
    opts.mode = bridge::parse_mode(mode);
    if (!latency.empty()) opts.latency = bridge::LatencyModel::parse(latency);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  opts.seed = seed;
  opts.tick_ms = tick;
  opts.max_time_ms = max_time;
  opts.ack_timeout_ms = ack_timeout;
  opts.free_running = free_running;
  opts.time_scale = time_scale;
  if (!out.empty())
    opts.out_dir = out;
  else if (const char* env = std::getenv("NXTBDI_OUT"))
    opts.out_dir = env;

  try {
    auto scenario = harness::load_scenario(project, world);
    auto result = harness::run_scenario(scenario, opts);
    return print_verdict(result.verdict);
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}
