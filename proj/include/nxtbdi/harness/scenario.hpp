#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nxtbdi/asl/program.hpp"
#include "nxtbdi/asl/project.hpp"
#include "nxtbdi/bridge/endpoint.hpp"
#include "nxtbdi/bridge/link.hpp"
#include "nxtbdi/harness/verdict.hpp"
#include "nxtbdi/sim/world.hpp"

namespace nxtbdi::harness {

/// Unreadable inputs, parse errors and project/program mismatches.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  bridge::Mode mode = bridge::Mode::async;
  /// Unset values fall back to the world spec (`seed`, `latency`,
  /// `max_time_ms`, `ack_timeout_ms`) and then to built-in defaults.
  std::optional<std::uint64_t> seed;
  std::optional<bridge::LatencyModel> latency;
  std::optional<long long> max_time_ms;
  std::optional<long long> ack_timeout_ms;
  long long tick_ms = 10;
  /// Every agent and robot on its own thread, paced by a clock thread.
  bool free_running = false;
  /// Free-running only: simulated milliseconds per wall-clock millisecond.
  double time_scale = 10.0;
  std::filesystem::path out_dir = "out";
};

struct Scenario {
  asl::ProjectConfig project;
  std::vector<asl::AgentProgram> programs;
  sim::WorldSpec spec;
  sim::World world;
};

Scenario load_scenario(const std::filesystem::path& project_file,
                       const std::filesystem::path& world_file);
Scenario make_scenario(asl::ProjectConfig project,
                       std::vector<asl::AgentProgram> programs,
                       sim::WorldSpec spec);

/// Throws ConfigError when `program` drives a motor or reads a sensor port
/// that `config` does not declare.
void check_config(const asl::AgentConfig& config,
                  const asl::AgentProgram& program);

struct RunResult {
  RunVerdict verdict;
  long long end_ms = 0;
  /// The scenario's completion condition held before the time limit.
  bool completed = false;
};

/// Runs, writes every output file into `options.out_dir`, then evaluates
/// the verdict from those files (the same path replay() takes).
RunResult run_scenario(const Scenario& s, const RunOptions& options);

/// Recomputes and rewrites verdict.txt from a run's output directory.
RunVerdict replay(const std::filesystem::path& out_dir);

}  // namespace nxtbdi::harness
