#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nxtbdi/bridge/link.hpp"
#include "nxtbdi/engine/agent.hpp"
#include "nxtbdi/sim/world.hpp"

namespace nxtbdi::harness {

/// `poses/<robot>.trace`: time_ms, x, y, heading (tab separated).
struct PoseSample {
  long long t = 0;
  double x = 0, y = 0, heading = 0;
};

/// `wire/<robot>.log`: time_ms (send time), seq, to_robot|to_engine, record.
struct WireLine {
  long long t = 0;
  std::uint64_t seq = 0;
  bridge::Direction dir = bridge::Direction::to_robot;
  std::string record;
};

/// `cycles/<agent>.log`: time_ms, cycle, events, steps, percepts, messages,
/// percept-queue-empty (0/1), actions, acks, internal messages sent, then
/// the cycle's key=value notes.
struct CycleLine {
  long long t = 0;
  engine::CycleReport report;

  std::vector<std::string> notes(const std::string& key) const;
};

struct Mount {
  int port = 1;
  double forward = 0, lateral = 0;
  std::string kind;
};

/// Everything a run leaves in its output directory.
struct Artifacts {
  std::map<std::string, std::string> meta;
  sim::WorldSpec world_spec;
  std::map<std::string, std::vector<PoseSample>> poses;
  std::map<std::string, std::vector<WireLine>> wire;
  std::map<std::string, std::vector<CycleLine>> cycles;

  std::string meta_or(const std::string& key, const std::string& fallback) const;
  std::vector<std::string> agents() const;
  std::vector<std::string> robots() const;
  std::string robot_of(const std::string& agent) const;
  std::vector<Mount> mounts(const std::string& robot) const;
};

std::string format_pose(const PoseSample& p);
std::string format_wire(const bridge::WireRecord& r);
std::string format_cycle(long long t, const engine::CycleReport& r);

PoseSample parse_pose(const std::string& line);
WireLine parse_wire(const std::string& line);
CycleLine parse_cycle(const std::string& line);

/// `run.meta` is key=value per line.
std::string format_meta(const std::map<std::string, std::string>& meta);
std::map<std::string, std::string> parse_meta(const std::string& text);

/// Reads an output directory; throws std::runtime_error on missing or
/// malformed files.
Artifacts load_artifacts(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& text);

}  // namespace nxtbdi::harness
