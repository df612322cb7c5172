#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nxtbdi/asl/parser.hpp"
#include "nxtbdi/harness/artifacts.hpp"
#include "nxtbdi/harness/scenario.hpp"
#include "nxtbdi/sim/median.hpp"
#include "nxtbdi/sim/robot.hpp"

using namespace nxtbdi;
using namespace nxtbdi::harness;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

fs::path scenario_dir() {
  if (const char* env = std::getenv("NXTBDI_SCENARIO_DIR")) return env;
  return NXTBDI_SCENARIO_DIR;
}

fs::path out_root() {
  return fs::temp_directory_path() / "nxtbdi-acceptance";
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int n, Outcome& o) {
  std::printf("criterion %d: %s %s\n", n, o.pass ? "PASS" : "FAIL",
              o.detail.str().c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RunResult run(const std::string& project, const std::string& world,
              RunOptions o, const std::string& tag) {
  auto s = load_scenario(scenario_dir() / project, scenario_dir() / world);
  o.out_dir = out_root() / tag;
  fs::remove_all(o.out_dir);
  return run_scenario(s, o);
}

bool criterion_pass(const RunVerdict& v, const std::string& name) {
  const Criterion* c = v.find(name);
  return c && c->pass;
}

double measured(const RunVerdict& v, const std::string& name,
                const std::string& key) {
  const Criterion* c = v.find(name);
  if (!c) return std::nan("");
  return c->value(key).value_or(std::nan(""));
}

bool same_tree(const fs::path& a, const fs::path& b) {
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    auto rel = fs::relative(e.path(), a);
    if (!fs::exists(b / rel) || read_file(e.path()) != read_file(b / rel))
      return false;
    ++files;
  }
  return files > 0;
}

void parser_corpus() {
  Outcome o;
  auto t0 = Clock::now();
  struct Expect {
    const char* file;
    std::size_t beliefs, rules, goals, plans;
  };
  for (auto e : {Expect{"linefollower/linefollower.asl", 0, 3, 1, 5},
                 Expect{"crossing/obstaclefinder.asl", 3, 1, 1, 6},
                 Expect{"crossing/blindagent.asl", 3, 1, 1, 6}}) {
    try {
      auto p = asl::parse_agent_program(read_file(scenario_dir() / e.file));
      bool counts = p.beliefs.size() == e.beliefs && p.rules.size() == e.rules &&
                    p.goals.size() == e.goals && p.plans.size() == e.plans;
      o.require(counts, std::string(e.file) + " counts");
      o.require(asl::parse_agent_program(asl::roundtrip_print(p)) == p,
                std::string(e.file) + " round trip");
      o.detail << fs::path(e.file).stem().string() << "=" << p.beliefs.size()
               << "/" << p.rules.size() << "/" << p.goals.size() << "/"
               << p.plans.size() << " ";
    } catch (const std::exception& ex) {
      o.require(false, std::string(e.file) + ": " + ex.what());
    }
  }
  double secs = seconds_since(t0);
  o.require(secs < 1.0, "runtime < 1 s");
  o.detail << "runtime_s=" << secs;
  report(1, o);
}

void line_follower() {
  Outcome o;
  const char* project = "linefollower/linefollower.mas2j";
  const char* world = "linefollower/s-curve.world";
  auto t0 = Clock::now();
  auto base = run(project, world, {}, "line-base");
  double secs = seconds_since(t0);

  const std::string robot = "linebot";
  o.require(base.completed, "track end reached");
  o.require(criterion_pass(base.verdict, "track_end_reached:" + robot),
            "track_end_reached");
  o.require(criterion_pass(base.verdict, "line_band:" + robot),
            "line band (<= 500 ms outside)");
  o.require(secs < 30.0, "runtime < 30 s");

  RunOptions slow;
  slow.latency = bridge::LatencyModel{60, 40};
  auto doubled = run(project, world, slow, "line-doubled");
  double lat1 = measured(base.verdict, "line_band:" + robot, "max_lateral_mm");
  double lat2 = measured(doubled.verdict, "line_band:" + robot, "max_lateral_mm");
  o.require(lat2 > lat1, "doubled latency increases max lateral deviation");

  o.detail << "end_ms=" << base.end_ms << " max_out_ms="
           << measured(base.verdict, "line_band:" + robot, "max_out_ms")
           << " max_lateral_mm=" << lat1 << " doubled_latency_max_lateral_mm="
           << lat2 << " runtime_s=" << secs;
  report(2, o);
}

// Criteria 3, 4 and the async half of 8 share these runs.
std::vector<RunResult> crossing_runs;

void crossing() {
  Outcome o3, o4;
  for (int k = 1; k <= 3; ++k) {
    auto r = run("crossing/crossing.mas2j",
                 "crossing/obstacle-at-" + std::to_string(k) + ".world", {},
                 "crossing-" + std::to_string(k));
    std::string tag = "K=" + std::to_string(k) + " ";
    for (const char* c : {"obstacle_reported_once", "avoid_adoption",
                          "no_collision", "final_bar_passed"})
      o3.require(criterion_pass(r.verdict, c), tag + c);
    double delta = measured(r.verdict, "avoid_adoption", "delta_cycles");
    o3.require(delta >= 0 && delta <= 2, tag + "adoption within 2 cycles");
    o3.detail << tag << "delta_cycles=" << delta << " clearance_mm="
              << measured(r.verdict, "no_collision", "min_clearance_mm") << " ";

    o4.require(criterion_pass(r.verdict, "shared_percept_messages"),
               tag + "shared_percept_messages");
    o4.detail << tag << "transport="
              << measured(r.verdict, "shared_percept_messages", "transport")
              << " internal="
              << measured(r.verdict, "shared_percept_messages", "internal") << " ";
    crossing_runs.push_back(std::move(r));
  }
  report(3, o3);
  report(4, o4);
}

void unique_beliefs() {
  Outcome o;
  auto r = run("sensorsuite/sensorsuite.mas2j", "sensorsuite/plain.world", {},
               "sensorsuite");
  const Criterion* c = r.verdict.find("unique_beliefs");
  o.require(c && c->pass, "unique_beliefs");
  double percepts = measured(r.verdict, "unique_beliefs", "light1_percepts");
  o.require(percepts >= 100, "at least 100 light percepts on port 1");
  o.require(measured(r.verdict, "unique_beliefs", "strict") == 1,
            "checked at every cycle boundary");
  o.detail << (c ? c->measured : std::string("missing"));
  for (const auto& prior : crossing_runs)
    o.require(criterion_pass(prior.verdict, "unique_beliefs"),
              "unique_beliefs in crossing runs");
  report(5, o);
}

long long oracle_median(std::vector<long long> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

void median_filter() {
  Outcome o;
  std::mt19937_64 rng(2024);
  const std::size_t sizes[] = {1, 3, 5, 9};
  std::size_t mismatches = 0, spike_misses = 0, spike_windows = 0;
  for (int i = 0; i < 100000; ++i) {
    std::size_t n = sizes[i % 4];
    sim::MedianWindow w(n);
    std::vector<long long> v;
    for (std::size_t k = 0; k < n; ++k) {
      v.push_back(static_cast<long long>(rng() % 1024));
      w.push(v.back());
    }
    if (w.median() != oracle_median(v)) ++mismatches;

    if (n >= 3) {
      // A clean window is the sensor over a uniform patch of floor.
      ++spike_windows;
      long long clean = 100 + static_cast<long long>(rng() % 800);
      sim::MedianWindow s(n);
      std::size_t at = rng() % n;
      for (std::size_t k = 0; k < n; ++k)
        s.push(k == at ? clean + (rng() % 2 ? 300 : -300) : clean);
      if (s.median() != clean) ++spike_misses;
    }
  }
  o.require(mismatches == 0, "sort-median agreement");
  o.require(spike_misses == 0, "spike suppressed");
  o.detail << "windows=100000 mismatches=" << mismatches
           << " spike_windows=" << spike_windows
           << " spike_misses=" << spike_misses;
  report(6, o);
}

void kinematics_and_determinism() {
  Outcome o;
  constexpr double pi = std::numbers::pi;
  using bridge::Motor;
  using bridge::Verb;

  sim::RobotBody straight;
  straight.apply_command({1, Verb::forward, {Motor::a, Motor::b}, {60, 60}});
  for (int i = 0; i < 1000; ++i) straight.step(0.001);
  double want_d = (60.0 / 360.0) * pi * 56.0;
  double err_d = std::abs(straight.pose().position.x() - want_d) / want_d;
  o.require(err_d < 1e-6, "straight drive");

  sim::RobotBody pivot;
  pivot.apply_command({1, Verb::block, {}, {1}});
  pivot.apply_command({2, Verb::rotate, {Motor::a, Motor::b}, {-200, 200}});
  for (int i = 0; i < 3000; ++i) pivot.step(0.001);
  double want_h = 2 * (200.0 / 360.0) * pi * 56.0 / 120.0;
  double err_h = std::abs(pivot.pose().heading - want_h) / want_h;
  o.require(err_h < 1e-6, "pivot rotation");
  o.require(pivot.pose().position.norm() < 1e-6, "pivot stays in place");

  auto a = run("crossing/crossing.mas2j", "crossing/obstacle-at-2.world", {},
               "repeat-a");
  auto b = run("crossing/crossing.mas2j", "crossing/obstacle-at-2.world", {},
               "repeat-b");
  o.require(same_tree(out_root() / "repeat-a", out_root() / "repeat-b"),
            "byte-identical traces");

  o.detail << "forward_mm=" << straight.pose().position.x()
           << " rel_err=" << err_d << " heading_rad=" << pivot.pose().heading
           << " rel_err=" << err_h << " repeat_identical="
           << (o.pass ? "yes" : "no");
  report(7, o);
}

void sync_async() {
  Outcome o;
  RunOptions sync;
  sync.mode = bridge::Mode::sync;
  auto s = run("crossing/crossing.mas2j", "crossing/obstacle-at-2.world", sync,
               "crossing-sync");
  const RunResult& a = crossing_runs.at(1);

  o.require(s.verdict.all_pass(), "sync run passes every criterion");
  o.require(a.verdict.all_pass(), "async run passes every criterion");
  double empty_sync = measured(s.verdict, "mode_contract", "empty_queue_cycles");
  double empty_async = measured(a.verdict, "mode_contract", "empty_queue_cycles");
  o.require(empty_sync == 0, "sync logs no empty-queue cycles");
  o.require(empty_async > 0, "async logs empty-queue cycles");
  double actions = measured(s.verdict, "ack_pairing", "actions");
  double acks = measured(s.verdict, "ack_pairing", "acks");
  o.require(criterion_pass(s.verdict, "ack_pairing") && actions == acks,
            "sync action steps pair with ACKs");
  o.detail << "sync_empty_queue_cycles=" << empty_sync
           << " async_empty_queue_cycles=" << empty_async
           << " sync_actions=" << actions << " sync_acks=" << acks;
  report(8, o);
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  fs::create_directories(out_root());
  try {
    parser_corpus();
    line_follower();
    crossing();
    unique_beliefs();
    median_filter();
    kinematics_and_determinism();
    sync_async();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
