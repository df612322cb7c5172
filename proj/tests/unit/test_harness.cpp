#include <doctest.h>

#include <filesystem>

#include "nxtbdi/asl/parser.hpp"
#include "nxtbdi/harness/artifacts.hpp"
#include "nxtbdi/harness/scenario.hpp"
#include "nxtbdi/harness/verdict.hpp"

using namespace nxtbdi;
using namespace nxtbdi::harness;
namespace fs = std::filesystem;

namespace {

std::string scenario(const std::string& rel) {
  return std::string(NXTBDI_SCENARIO_DIR) + "/" + rel;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("nxtbdi-unit-" + name);
  fs::remove_all(p);
  return p;
}

asl::AgentConfig config(const char* block) {
  return asl::parse_project_file(block).agents.at(0);
}

const char* kLightOnly = R"blk(walker walker.asl
  [btname="bot", btaddress="00:16:53:0A:1B:01", motora="true", motorb="true",
   motorc="false", sensor1="light", sensor2="none", sensor3="none",
   sensor4="none", sleep="50"]
  agentArchClass arch.LEGOAgArchitecture
  beliefBaseClass agent.UniqueBelsBB("light(port,_)");
)blk";

}  // namespace

TEST_CASE("check_config names the agent and port") {
  auto cfg = config(kLightOnly);
  CHECK_NOTHROW(check_config(
      cfg, asl::parse_agent_program("+light(1,V) <- forward([a,b],[60,60]).")));
  try {
    check_config(cfg, asl::parse_agent_program("+obstacle(4,D) <- stop([a,b])."));
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    std::string what = e.what();
    CHECK(what.find("walker") != std::string::npos);
    CHECK(what.find("port 4") != std::string::npos);
  }
  CHECK_THROWS_AS(
      check_config(cfg, asl::parse_agent_program("!g. +!g <- forward([c],[60]).")),
      ConfigError);
  CHECK_THROWS_AS(
      check_config(cfg, asl::parse_agent_program(
                            "!g. +!g <- .wait(\"+light(2,_)\").")),
      ConfigError);
}

TEST_CASE("zero-agent project completes at once") {
  auto s = make_scenario({}, {}, sim::WorldSpec::parse("kind = plain\n"));
  RunOptions o;
  o.out_dir = scratch("empty");
  auto r = run_scenario(s, o);
  CHECK(r.completed);
  CHECK(r.end_ms == 0);
  CHECK(r.verdict.all_pass());
  CHECK(fs::exists(o.out_dir / "verdict.txt"));
}

TEST_CASE("missing inputs are config errors") {
  CHECK_THROWS_AS(load_scenario("missing.mas2j", scenario("linefollower/s-curve.world")),
                  ConfigError);
}

TEST_CASE("trace line formats round trip") {
  PoseSample p{120, 10.5, -3.25, 0.125};
  auto q = parse_pose(format_pose(p));
  CHECK(q.t == 120);
  CHECK(q.x == p.x);
  CHECK(q.y == p.y);
  CHECK(q.heading == p.heading);
  CHECK(format_pose({0, 0, 0, -0.0}).find("-0") == std::string::npos);

  bridge::WireRecord r{30, 55, 4, bridge::Direction::to_engine, "P|LIGHT|1|360"};
  auto w = parse_wire(format_wire(r));
  CHECK(w.t == 30);
  CHECK(w.seq == 4);
  CHECK(w.dir == bridge::Direction::to_engine);
  CHECK(w.record == "P|LIGHT|1|360");

  engine::CycleReport c;
  c.cycle = 7;
  c.events = 1;
  c.steps = 1;
  c.percept_queue_empty = false;
  c.notes = {{"event", "+!move"}, {"step", "forward([a,b],[60,60])"}};
  auto cl = parse_cycle(format_cycle(500, c));
  CHECK(cl.t == 500);
  CHECK(cl.report.cycle == 7);
  CHECK_FALSE(cl.report.percept_queue_empty);
  CHECK(cl.notes("step") == std::vector<std::string>{"forward([a,b],[60,60])"});

  std::map<std::string, std::string> meta{{"mode", "sync"}, {"seed", "7"}};
  CHECK(parse_meta(format_meta(meta)) == meta);
}

TEST_CASE("verdict text round trip") {
  RunVerdict v;
  v.criteria.push_back({"line_band:linebot", true, "max_out_ms=0 band_mm=55.000"});
  v.criteria.push_back({"no_collision", false, "min_clearance_mm=-2.5"});
  auto back = RunVerdict::parse(v.to_text());
  REQUIRE(back.criteria.size() == 2);
  CHECK_FALSE(back.all_pass());
  CHECK(back.find("no_collision")->value("min_clearance_mm") == -2.5);
  CHECK(back.find("line_band:linebot")->value("band_mm") == 55.0);
  CHECK_FALSE(back.find("line_band:linebot")->value("nope"));
}

TEST_CASE("clearance between a footprint and a box") {
  sim::Box2d box(sim::Vec2d(100, -10), sim::Vec2d(120, 10));
  std::array<sim::Vec2d, 4> quad{sim::Vec2d(0, 5), sim::Vec2d(0, -5),
                                 sim::Vec2d(50, -5), sim::Vec2d(50, 5)};
  CHECK(clearance(quad, box) == doctest::Approx(50));
  for (auto& c : quad) c.x() += 60;
  CHECK(clearance(quad, box) <= 0);
}

TEST_CASE("lock-step runs reproduce byte for byte and replay agrees") {
  auto s = load_scenario(scenario("sensorsuite/sensorsuite.mas2j"),
                         scenario("sensorsuite/plain.world"));
  RunOptions o;
  o.max_time_ms = 3000;
  fs::path a = scratch("repro-a"), b = scratch("repro-b");
  o.out_dir = a;
  auto first = run_scenario(s, o);
  o.out_dir = b;
  run_scenario(s, o);
  int files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    auto rel = fs::relative(entry.path(), a);
    CAPTURE(rel.string());
    CHECK(read_file(entry.path()) == read_file(b / rel));
    ++files;
  }
  CHECK(files >= 6);
  CHECK(replay(o.out_dir).to_text() == first.verdict.to_text());
}
