#include "nxtbdi/harness/artifacts.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nxtbdi::harness {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

long long to_ll(const std::string& s) {
  std::size_t used = 0;
  long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

std::vector<std::string> CycleLine::notes(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : report.notes)
    if (k == key) out.push_back(v);
  return out;
}

std::string Artifacts::meta_or(const std::string& key,
                               const std::string& fallback) const {
  auto it = meta.find(key);
  return it == meta.end() ? fallback : it->second;
}

std::vector<std::string> Artifacts::agents() const {
  std::string list = meta_or("agents", "");
  return list.empty() ? std::vector<std::string>{} : split(list, ',');
}

std::vector<std::string> Artifacts::robots() const {
  std::string list = meta_or("robots", "");
  return list.empty() ? std::vector<std::string>{} : split(list, ',');
}

std::string Artifacts::robot_of(const std::string& agent) const {
  return meta_or("agent." + agent + ".robot", "");
}

std::vector<Mount> Artifacts::mounts(const std::string& robot) const {
  std::vector<Mount> out;
  for (int port = 1; port <= 4; ++port) {
    auto it = meta.find(fmt::format("mount.{}.{}", robot, port));
    if (it == meta.end()) continue;
    auto f = split(it->second, ',');
    if (f.size() != 3)
      throw std::runtime_error("run.meta: bad mount entry " + it->first);
    out.push_back({port, std::stod(f[0]), std::stod(f[1]), f[2]});
  }
  return out;
}

std::string format_pose(const PoseSample& p) {
  // Adding 0.0 turns a rounded -0 into +0.
  auto r = [](double v, double scale) { return std::round(v * scale) / scale + 0.0; };
  return fmt::format("{}\t{:.3f}\t{:.3f}\t{:.6f}", p.t, r(p.x, 1e3),
                     r(p.y, 1e3), r(p.heading, 1e6));
}

std::string format_wire(const bridge::WireRecord& r) {
  return fmt::format("{}\t{}\t{}\t{}", r.sent_ms, r.seq,
                     r.dir == bridge::Direction::to_robot ? "to_robot"
                                                          : "to_engine",
                     r.text);
}

std::string format_cycle(long long t, const engine::CycleReport& r) {
  std::string out = fmt::format(
      "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}", t, r.cycle, r.events, r.steps,
      r.percepts, r.messages, r.percept_queue_empty ? 1 : 0, r.actions, r.acks,
      r.internal_sent);
  for (const auto& [k, v] : r.notes) out += "\t" + k + "=" + v;
  return out;
}

PoseSample parse_pose(const std::string& line) {
  auto f = split(line, '\t');
  if (f.size() != 4) throw std::runtime_error("bad pose line: " + line);
  return {to_ll(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3])};
}

WireLine parse_wire(const std::string& line) {
  auto f = split(line, '\t');
  if (f.size() != 4) throw std::runtime_error("bad wire line: " + line);
  WireLine w;
  w.t = to_ll(f[0]);
  w.seq = static_cast<std::uint64_t>(to_ll(f[1]));
  if (f[2] == "to_robot")
    w.dir = bridge::Direction::to_robot;
  else if (f[2] == "to_engine")
    w.dir = bridge::Direction::to_engine;
  else
    throw std::runtime_error("bad wire direction: " + line);
  w.record = f[3];
  return w;
}

CycleLine parse_cycle(const std::string& line) {
  auto f = split(line, '\t');
  if (f.size() < 10) throw std::runtime_error("bad cycle line: " + line);
  CycleLine c;
  c.t = to_ll(f[0]);
  auto& r = c.report;
  r.cycle = static_cast<std::uint64_t>(to_ll(f[1]));
  r.events = static_cast<std::size_t>(to_ll(f[2]));
  r.steps = static_cast<std::size_t>(to_ll(f[3]));
  r.percepts = static_cast<std::size_t>(to_ll(f[4]));
  r.messages = static_cast<std::size_t>(to_ll(f[5]));
  r.percept_queue_empty = f[6] == "1";
  r.actions = static_cast<std::size_t>(to_ll(f[7]));
  r.acks = static_cast<std::size_t>(to_ll(f[8]));
  r.internal_sent = static_cast<std::size_t>(to_ll(f[9]));
  for (std::size_t k = 10; k < f.size(); ++k) {
    auto eq = f[k].find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("bad cycle note: " + f[k]);
    r.notes.emplace_back(f[k].substr(0, eq), f[k].substr(eq + 1));
  }
  return c;
}

std::string format_meta(const std::map<std::string, std::string>& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += k + "=" + v + "\n";
  return out;
}

std::map<std::string, std::string> parse_meta(const std::string& text) {
  std::map<std::string, std::string> out;
  for (const auto& line : lines_of(text)) {
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("run.meta: bad line: " + line);
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

Artifacts load_artifacts(const std::filesystem::path& dir) {
  Artifacts a;
  a.meta = parse_meta(read_file(dir / "run.meta"));
  a.world_spec = sim::WorldSpec::parse(read_file(dir / "world.spec"));
  for (const auto& robot : a.robots()) {
    for (const auto& line : lines_of(read_file(dir / "poses" / (robot + ".trace"))))
      a.poses[robot].push_back(parse_pose(line));
    for (const auto& line : lines_of(read_file(dir / "wire" / (robot + ".log"))))
      a.wire[robot].push_back(parse_wire(line));
  }
  for (const auto& agent : a.agents()) {
    auto& v = a.cycles[agent];
    for (const auto& line : lines_of(read_file(dir / "cycles" / (agent + ".log"))))
      v.push_back(parse_cycle(line));
  }
  return a;
}

}  // namespace nxtbdi::harness
