#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nxtbdi/sim/brick.hpp"
#include "nxtbdi/sim/median.hpp"
#include "nxtbdi/sim/robot.hpp"
#include "nxtbdi/sim/world.hpp"

using namespace nxtbdi;
using namespace nxtbdi::sim;
using bridge::ActionCommand;
using bridge::Motor;
using bridge::Verb;

namespace {

constexpr double pi = std::numbers::pi;

long long sort_median(std::vector<long long> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

ActionCommand cmd(Verb v, std::vector<Motor> m, std::vector<long long> args,
                  std::uint64_t id = 1) {
  return {id, v, std::move(m), std::move(args)};
}

void run(RobotBody& b, double seconds, double dt = 0.001) {
  for (int i = 0, n = static_cast<int>(std::lround(seconds / dt)); i < n; ++i)
    b.step(dt);
}

World world_from(const char* text) { return build_world(WorldSpec::parse(text)); }

}  // namespace

TEST_CASE("median window") {
  MedianWindow w(3);
  w.push(360);
  CHECK(w.median() == 360);
  MedianWindow s(3);
  for (long long v : {300, 900, 310}) s.push(v);
  CHECK(s.median() == 310);
}

TEST_CASE("median agrees with a sort oracle") {
  std::mt19937_64 rng(17);
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 9u}) {
    MedianWindow w(n);
    std::vector<long long> last;
    for (int i = 0; i < 5000; ++i) {
      long long v = static_cast<long long>(rng() % 1024);
      w.push(v);
      last.push_back(v);
      if (last.size() > n) last.erase(last.begin());
      REQUIRE(w.median() == sort_median(last));
    }
  }
}

TEST_CASE("one spike stays within the spread of the clean samples") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20000; ++i) {
    std::size_t n = std::vector<std::size_t>{3, 5, 9}[rng() % 3];
    std::vector<long long> clean;
    long long base = 300 + static_cast<long long>(rng() % 400);
    for (std::size_t k = 0; k < n; ++k)
      clean.push_back(base + static_cast<long long>(rng() % 17) - 8);
    auto spiked = clean;
    std::size_t at = rng() % n;
    spiked[at] += rng() % 2 ? 300 : -300;
    MedianWindow w(n);
    for (auto v : spiked) w.push(v);
    std::vector<long long> rest = clean;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(at));
    auto [lo, hi] = std::minmax_element(rest.begin(), rest.end());
    CHECK(w.median() >= *lo);
    CHECK(w.median() <= *hi);
  }
}

TEST_CASE("straight drive") {
  RobotBody b;
  b.apply_command(cmd(Verb::forward, {Motor::a, Motor::b}, {60, 60}));
  run(b, 1.0);
  double expected = (60.0 / 360.0) * pi * 56.0;
  CHECK(b.pose().position.x() == doctest::Approx(expected).epsilon(1e-6));
  CHECK(std::abs(b.pose().position.y()) < 1e-9);
  CHECK(std::abs(b.pose().heading) < 1e-9);
  CHECK(b.arc_length(60) == doctest::Approx(29.32).epsilon(1e-3));
}

TEST_CASE("pivot rotation") {
  RobotBody b;
  b.apply_command(cmd(Verb::block, {}, {1}));
  auto ack = b.apply_command(cmd(Verb::rotate, {Motor::a, Motor::b}, {-200, 200}, 2));
  CHECK_FALSE(ack);
  CHECK(b.rotating());
  run(b, 3.0);
  CHECK_FALSE(b.rotating());
  double arc = (200.0 / 360.0) * pi * 56.0;
  CHECK(b.pose().heading == doctest::Approx(2 * arc / 120.0).epsilon(1e-6));
  CHECK(b.pose().heading == doctest::Approx(1.629).epsilon(1e-3));
  CHECK(b.pose().position.norm() < 1e-6);
  CHECK(b.motor(Motor::a).tacho == doctest::Approx(-200));
  CHECK(b.motor(Motor::b).tacho == doctest::Approx(200));
}

TEST_CASE("equal and mirrored motor histories") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    RobotBody straight, pivot;
    for (int seg = 0; seg < 5; ++seg) {
      long long sp = 10 + static_cast<long long>(rng() % 400);
      straight.apply_command(cmd(Verb::forward, {Motor::a, Motor::b}, {sp, sp}));
      pivot.apply_command(cmd(Verb::forward, {Motor::a}, {sp}));
      pivot.apply_command(cmd(Verb::backward, {Motor::b}, {sp}));
      double dt = 0.01 * (1 + rng() % 50);
      straight.step(dt);
      pivot.step(dt);
    }
    CHECK(std::abs(straight.pose().heading) < 1e-9);
    CHECK(pivot.pose().position.norm() < 1e-6);
  }
}

TEST_CASE("idle motors leave the pose unchanged") {
  RobotBody b({}, Pose2d{{5, 7}, 0.3});
  run(b, 2.0);
  CHECK(b.pose().position == Vec2d(5, 7));
  CHECK(b.pose().heading == 0.3);
}

TEST_CASE("reverse swaps directions") {
  RobotBody b;
  b.apply_command(cmd(Verb::forward, {Motor::a}, {60}));
  b.apply_command(cmd(Verb::backward, {Motor::b}, {60}));
  b.apply_command(cmd(Verb::reverse, {Motor::a, Motor::b}, {}));
  CHECK(b.motor(Motor::a).mode == MotorMode::backward);
  CHECK(b.motor(Motor::b).mode == MotorMode::forward);
}

TEST_CASE("unconnected motor is rejected") {
  RobotBody b;
  b.motor(Motor::c).connected = false;
  auto ack = b.apply_command(cmd(Verb::forward, {Motor::c}, {60}, 9));
  REQUIRE(ack);
  CHECK(ack->id == 9);
  CHECK_FALSE(ack->ok);
}

TEST_CASE("tacho integrates commanded speed") {
  RobotBody b;
  b.apply_command(cmd(Verb::forward, {Motor::a}, {60}));
  run(b, 1.5, 0.01);
  b.apply_command(cmd(Verb::speed, {Motor::a}, {90}));
  run(b, 0.5, 0.01);
  b.apply_command(cmd(Verb::backward, {Motor::a}, {40}));
  run(b, 1.0, 0.01);
  CHECK(b.motor(Motor::a).tacho == doctest::Approx(60 * 1.5 + 90 * 0.5 - 40));
}

TEST_CASE("ultrasonic quantization") {
  CHECK(quantize_ultrasonic(412) == 42);
  CHECK(quantize_ultrasonic(400) == 39);
  CHECK(quantize_ultrasonic(0) == 0);
  CHECK(quantize_ultrasonic(1e6) == 255);
}

TEST_CASE("blocking rotate defers its ACK and queues later commands") {
  World w = world_from("kind = plain");
  bridge::SimulatedLink link({0, 0}, 1);
  Brick brick("bot", RobotBody{}, w, link.robot_end(), NoiseModel::none(), 1);
  auto& eng = link.engine_end();
  eng.send("A|1|BLK||1", 0);
  eng.send("A|2|ROT|a,b|-200,200", 0);
  eng.send("A|3|FWD|a,b|60,60", 0);
  brick.intake(0);
  CHECK(brick.awaiting_rotation());
  CHECK(brick.queued_commands() == 1);

  std::vector<std::string> acks;
  auto collect = [&](long long now) {
    while (auto d = eng.poll(now)) acks.push_back(d->record);
  };
  collect(0);
  CHECK(acks == std::vector<std::string>{"K|1"});

  long long now = 0;
  while (brick.awaiting_rotation() && now < 5000) {
    now += 10;
    brick.step(now, 10);
    brick.intake(now);
    collect(now);
  }
  CHECK_FALSE(brick.awaiting_rotation());
  CHECK(now >= 550);
  CHECK(acks == std::vector<std::string>{"K|1", "K|2", "K|3"});
  CHECK(brick.body().motor(Motor::a).mode == MotorMode::forward);
}

TEST_CASE("exit halts the brick") {
  World w = world_from("kind = plain");
  bridge::SimulatedLink link({0, 0}, 1);
  Brick brick("bot", RobotBody{}, w, link.robot_end(), NoiseModel::none(), 1);
  link.engine_end().send("X", 0);
  brick.intake(0);
  CHECK(brick.halted());
}

TEST_CASE("empty world: ultrasonic reads 255") {
  World w = world_from("kind = plain");
  bridge::SimulatedLink link({0, 0}, 1);
  Brick brick("bot", RobotBody{}, w, link.robot_end(), NoiseModel::none(), 1);
  brick.mount(4, SensorKind::ultrasonic, 50, default_mount_offset(SensorKind::ultrasonic, 4));
  std::mt19937 rng(2);
  for (int i = 0; i < 50; ++i) {
    brick.body().set_pose({{double(rng() % 5000) - 2500, double(rng() % 5000) - 2500},
                           double(rng() % 628) / 100});
    CHECK(brick.raw_reading(brick.body().sensors().back()) == 255);
  }
}

TEST_CASE("ultrasonic reads a wall ahead") {
  World w = world_from("kind = plain\nobstacle = 442,-100,500,100\n");
  bridge::SimulatedLink link({0, 0}, 1);
  Brick brick("bot", RobotBody{}, w, link.robot_end(), NoiseModel::none(), 1);
  brick.mount(4, SensorKind::ultrasonic, 50, {30, 0});
  // Sensor at x=30, wall at 442: 412 mm.
  CHECK(brick.raw_reading(brick.body().sensors().back()) == 42);
}

TEST_CASE("sample phases are staggered by port") {
  World w = world_from("kind = plain");
  bridge::SimulatedLink link({0, 0}, 1);
  Brick brick("bot", RobotBody{}, w, link.robot_end(), NoiseModel::none(), 1);
  brick.mount(1, SensorKind::light, 40, {60, 20});
  brick.mount(3, SensorKind::light, 40, {60, -20});
  brick.sample(0);
  auto first = link.engine_end().poll(0);
  REQUIRE(first);
  CHECK(first->record == "P|LIGHT|1|700");
  CHECK_FALSE(link.engine_end().poll(0));
  brick.sample(20);
  auto second = link.engine_end().poll(20);
  REQUIRE(second);
  CHECK(second->record == "P|LIGHT|3|700");
}

TEST_CASE("crossing world layout") {
  World w = world_from("preset = crossing-6-bars-obstacle-at-2");
  const Crossing* c = w.crossing();
  REQUIRE(c);
  CHECK(c->bar_count == 6);
  for (int i = 1; i <= 6; ++i) {
    auto [a, b] = c->bar(i);
    CHECK(w.light_at({(a + b) / 2, c->lane_y}) < 400);
    CHECK(w.light_at({b + 40, c->lane_y}) >= 400);
  }
  REQUIRE(w.obstacles().size() == 1);
  double front = w.obstacles()[0].min().x();
  CHECK(front >= c->bar(3).first);
  CHECK(front < c->bar(3).second);
}

TEST_CASE("s-curve mounts straddle the line") {
  World w = world_from("preset = linetrack-s-curve");
  const LineTrack* track = w.line_track();
  REQUIRE(track);
  CHECK(track->path.length() >= 1000);
  Pose2d start;
  for (double lat : {20.0, -20.0})
    CHECK(w.light_at(start.to_world({60, lat})) >= 350);
  CHECK(w.light_at(start.to_world({60, 0})) < 350);
  CHECK(w.band_half_width() == doctest::Approx(55));
}

TEST_CASE("build_world rejects bad geometry") {
  CHECK_THROWS_AS(world_from("kind = crossing\ncrossing.bars = 0\n"), SpecError);
  CHECK_THROWS_AS(world_from("kind = crossing\ncrossing.bar_width = 0\n"),
                  SpecError);
  CHECK_THROWS_AS(world_from("kind = crossing\ncrossing.bars = 6\n"
                             "crossing.obstacle_after = 6\n"),
                  SpecError);
  CHECK_THROWS_AS(world_from("preset = crossing-6-bars-obstacle-at-0"), SpecError);
  CHECK_THROWS_AS(world_from("kind = moon"), SpecError);
}

TEST_CASE("same spec builds the same world") {
  const char* spec = "preset = crossing-6-bars-obstacle-at-3";
  World a = world_from(spec), b = world_from(spec);
  CHECK(a.obstacles()[0].min() == b.obstacles()[0].min());
  for (double x = 0; x < 2000; x += 7.3)
    CHECK(a.light_at({x, 0}) == b.light_at({x, 0}));
}

TEST_CASE("percept stream is deterministic per seed") {
  World w = world_from("preset = linetrack-s-curve");
  auto stream = [&](std::uint64_t seed) {
    bridge::SimulatedLink link({30, 20}, seed);
    Brick brick("bot", RobotBody{}, w, link.robot_end(), NoiseModel{}, seed);
    brick.mount(1, SensorKind::light, 50, {60, 20});
    brick.mount(2, SensorKind::light, 50, {60, -20});
    link.engine_end().send("A|1|FWD|a,b|60,60", 0);
    for (long long now = 0; now <= 5000; now += 10) {
      brick.step(now, 10);
      brick.intake(now);
      brick.sample(now);
    }
    std::vector<std::string> out;
    for (const auto& r : link.log())
      out.push_back(std::to_string(r.sent_ms) + " " + r.text);
    return out;
  };
  auto a = stream(42), b = stream(42), c = stream(43);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("light noise produces occasional spikes") {
  World w = world_from("kind = plain\nlight.plain = 500\n");
  bridge::SimulatedLink link({0, 0}, 1);
  Brick brick("bot", RobotBody{}, w, link.robot_end(), NoiseModel{}, 8);
  brick.mount(1, SensorKind::light, 50, {60, 20});
  int spikes = 0;
  for (int i = 0; i < 4000; ++i)
    if (std::abs(brick.raw_reading(brick.body().sensors()[0]) - 500) > 150) ++spikes;
  CHECK(spikes > 100);
  CHECK(spikes < 300);
}
