#include "nxtbdi/harness/scenario.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

#include "nxtbdi/asl/parser.hpp"
#include "nxtbdi/engine/agent.hpp"
#include "nxtbdi/harness/artifacts.hpp"
#include "nxtbdi/sim/brick.hpp"

namespace nxtbdi::harness {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// loading and checking

Scenario make_scenario(asl::ProjectConfig project,
                       std::vector<asl::AgentProgram> programs,
                       sim::WorldSpec spec) {
  if (programs.size() != project.agents.size())
    throw ConfigError("one program per agent is required");
  std::set<std::string> bricks;
  for (std::size_t i = 0; i < project.agents.size(); ++i) {
    const auto& a = project.agents[i];
    if (!bricks.insert(a.btname).second)
      throw ConfigError(fmt::format(
          "agent '{}': brick '{}' is already driven by another agent", a.name,
          a.btname));
    check_config(a, programs[i]);
  }
  Scenario s{std::move(project), std::move(programs), std::move(spec), {}};
  try {
    s.world = sim::build_world(s.spec);
    sim::body_from_spec(s.spec);
    sim::NoiseModel::from_spec(s.spec);
  } catch (const sim::SpecError& e) {
    throw ConfigError(std::string("world: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const fs::path& project_file, const fs::path& world_file) {
  std::string project_text, world_text;
  try {
    project_text = read_file(project_file);
    world_text = read_file(world_file);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  asl::ProjectConfig project;
  try {
    project = asl::parse_project_file(project_text);
  } catch (const asl::ProjectError& e) {
    throw ConfigError(project_file.string() + ": " + e.what());
  }
  std::vector<asl::AgentProgram> programs;
  for (const auto& a : project.agents) {
    fs::path src = project_file.parent_path() / a.source_path;
    std::string text;
    try {
      text = read_file(src);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("agent '{}': {}", a.name, e.what()));
    }
    try {
      programs.push_back(asl::parse_agent_program(text));
    } catch (const asl::ParseError& e) {
      throw ConfigError(fmt::format("{}:{}:{}: {}", src.string(), e.line(),
                                    e.column(), e.what()));
    }
  }
  sim::WorldSpec spec;
  try {
    spec = sim::WorldSpec::parse(world_text);
  } catch (const sim::SpecError& e) {
    throw ConfigError(world_file.string() + ": " + e.what());
  }
  return make_scenario(std::move(project), std::move(programs), std::move(spec));
}

namespace {

std::optional<SensorKind> sensor_for(const Term& t) {
  if (!t.is_structure() || t.arity() != 2) return std::nullopt;
  static const std::map<std::string, SensorKind> kinds = {
      {"light", SensorKind::light},
      {"obstacle", SensorKind::ultrasonic},
      {"touching", SensorKind::touch},
      {"sound", SensorKind::sound}};
  auto it = kinds.find(t.name());
  if (it == kinds.end()) return std::nullopt;
  return it->second;
}

void check_sensor_literal(const asl::AgentConfig& c, const Term& t) {
  auto kind = sensor_for(t);
  if (!kind) return;
  const Term& port = t.args()[0];
  if (port.is_number()) {
    double p = port.value();
    if (p < 1 || p > 4 || p != std::floor(p))
      throw ConfigError(fmt::format("agent '{}': {} names port {}, ports are 1-4",
                                    c.name, to_string(t), format_number(p)));
    int idx = static_cast<int>(p);
    if (c.sensors[idx - 1] != *kind)
      throw ConfigError(fmt::format(
          "agent '{}': {} needs a {} sensor on port {}, but sensor{}={}",
          c.name, to_string(t), to_string(*kind), idx, idx,
          to_string(c.sensors[idx - 1])));
  } else if (std::find(c.sensors.begin(), c.sensors.end(), *kind) ==
             c.sensors.end()) {
    throw ConfigError(fmt::format(
        "agent '{}': {} needs a {} sensor, but none of ports 1-4 has one",
        c.name, to_string(t), to_string(*kind)));
  }
}

void check_formula(const asl::AgentConfig& c, const asl::Formula& f) {
  switch (f.kind()) {
    case asl::Formula::Kind::literal:
      check_sensor_literal(c, f.term());
      break;
    case asl::Formula::Kind::negation:
    case asl::Formula::Kind::conjunction:
      for (const auto& child : f.children()) check_formula(c, child);
      break;
    default:
      break;
  }
}

}  // namespace

void check_config(const asl::AgentConfig& c, const asl::AgentProgram& p) {
  static const std::set<std::string> motor_verbs = {
      "forward", "backward", "rotate", "reverse", "speed", "stop"};
  for (const auto& r : p.rules) check_formula(c, r.body);
  for (const auto& plan : p.plans) {
    if (plan.trigger.kind == asl::GoalKind::belief)
      check_sensor_literal(c, plan.trigger.term);
    if (plan.context) check_formula(c, *plan.context);
    for (const auto& step : plan.body) {
      const Term& t = step.term;
      if (step.kind == asl::StepKind::test) check_sensor_literal(c, t);
      if (step.kind == asl::StepKind::internal_action && t.name() == ".wait" &&
          t.arity() == 1 && t.args()[0].is_string()) {
        try {
          check_sensor_literal(c, asl::parse_trigger(t.args()[0].name()).term);
        } catch (const asl::ParseError&) {
        }
      }
      if (step.kind != asl::StepKind::action || !motor_verbs.count(t.name()) ||
          t.arity() < 1 || !t.args()[0].is_list())
        continue;
      for (const auto& m : t.args()[0].args()) {
        if (!m.is_atom() || m.name().size() != 1) continue;
        char letter = m.name()[0];
        if (letter < 'a' || letter > 'c') continue;
        if (!c.motors[letter - 'a'])
          throw ConfigError(fmt::format(
              "agent '{}': {} drives motor {}, but motor{}=false", c.name,
              t.name(), letter, letter));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// running

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct RobotRig {
  std::string name;
  std::unique_ptr<bridge::SimulatedLink> link;
  std::unique_ptr<sim::Brick> brick;
  std::string trace;
  std::atomic<bool> done{false};
};

struct AgentRig {
  const asl::AgentConfig* config = nullptr;
  RobotRig* robot = nullptr;
  std::unique_ptr<bridge::BridgeEndpoint> endpoint;
  std::unique_ptr<engine::Agent> agent;
  std::string log;
  std::set<std::string> seen_keys;
  std::atomic<bool> halted{false};
};

class Runner {
 public:
  Runner(const Scenario& s, const RunOptions& o) : s_(s), o_(o) {
    seed_ = o.seed ? *o.seed
                   : static_cast<std::uint64_t>(s.spec.integer("seed", 42));
    if (o.latency) {
      latency_ = *o.latency;
    } else if (auto text = s.spec.get("latency")) {
      latency_ = bridge::LatencyModel::parse(*text);
    }
    max_time_ = o.max_time_ms ? *o.max_time_ms
                              : s.spec.integer("max_time_ms", 60000);
    ack_timeout_ = o.ack_timeout_ms ? *o.ack_timeout_ms
                                    : s.spec.integer("ack_timeout_ms", 1000);
    if (o.tick_ms < 1) throw ConfigError("tick must be at least 1 ms");
    if (max_time_ < 0) throw ConfigError("max time must not be negative");
    build();
  }

  RunResult run() {
    for (auto& r : robots_) record_pose(*r, 0);
    if (o_.free_running)
      run_threads();
    else
      run_lockstep();
    write_outputs();
    RunResult res;
    res.verdict = replay(o_.out_dir);
    res.end_ms = now_.load();
    res.completed = completed_;
    return res;
  }

 private:
  void build() {
    sim::BodyGeometry body = sim::body_from_spec(s_.spec);
    sim::NoiseModel noise = sim::NoiseModel::from_spec(s_.spec);
    auto window = static_cast<std::size_t>(s_.spec.integer("noise.window", 5));
    if (window < 1) throw ConfigError("noise.window must be at least 1");

    for (std::size_t i = 0; i < s_.project.agents.size(); ++i) {
      const auto& cfg = s_.project.agents[i];
      auto rig = std::make_unique<RobotRig>();
      rig->name = cfg.btname;
      rig->link = std::make_unique<bridge::SimulatedLink>(
          latency_, mix_seed(seed_, 2 * i));

      sim::Pose2d start;
      std::string key = "robot." + cfg.btname + ".start";
      auto st = s_.spec.numbers(key);
      if (!st.empty()) {
        if (st.size() != 3)
          throw ConfigError("world: " + key + " expects x,y,heading_deg");
        start.position = {st[0], st[1]};
        start.heading = st[2] * std::numbers::pi / 180.0;
      }
      sim::RobotBody robot(body, start);
      for (int m = 0; m < 3; ++m)
        robot.motor(static_cast<bridge::Motor>(m)).connected = cfg.motors[m];
      rig->brick = std::make_unique<sim::Brick>(
          cfg.btname, std::move(robot), s_.world, rig->link->robot_end(), noise,
          mix_seed(seed_, 2 * i + 1));
      for (int port = 1; port <= 4; ++port) {
        SensorKind kind = cfg.sensors[port - 1];
        if (kind == SensorKind::none) continue;
        sim::Vec2d offset = sim::default_mount_offset(kind, port);
        std::string mkey = fmt::format("robot.{}.mount.{}", cfg.btname, port);
        auto mo = s_.spec.numbers(mkey);
        if (!mo.empty()) {
          if (mo.size() != 2)
            throw ConfigError("world: " + mkey + " expects forward,lateral");
          offset = {mo[0], mo[1]};
        }
        rig->brick->mount(port, kind, cfg.sleep_ms, offset, window);
        meta_[fmt::format("mount.{}.{}", cfg.btname, port)] = fmt::format(
            "{},{},{}", format_number(offset.x()), format_number(offset.y()),
            to_string(kind));
      }
      robots_.push_back(std::move(rig));
    }

    for (std::size_t i = 0; i < s_.project.agents.size(); ++i) {
      const auto& cfg = s_.project.agents[i];
      auto rig = std::make_unique<AgentRig>();
      rig->config = &cfg;
      rig->robot = robots_[i].get();
      rig->endpoint = std::make_unique<bridge::BridgeEndpoint>(
          o_.mode, rig->robot->link->engine_end(),
          [this] { return now_.load(); }, ack_timeout_);
      std::vector<UniquenessPattern> patterns;
      for (const auto& t : cfg.unique_patterns)
        patterns.push_back(UniquenessPattern::from_term(t));
      engine::AgentOptions opts;
      opts.robot = cfg.btname;
      rig->agent = std::make_unique<engine::Agent>(
          cfg.name, s_.programs[i], std::move(patterns), rig->endpoint.get(),
          &router_, opts);
      router_.register_agent(cfg.name, rig->agent->mailbox());
      AgentRig* raw = rig.get();
      rig->agent->set_cycle_hook(
          [raw](const engine::Agent& a, engine::CycleReport& r) {
            unique_note(*raw, a, r);
          });
      agents_.push_back(std::move(rig));
    }
  }

  static void unique_note(AgentRig& rig, const engine::Agent& a,
                          engine::CycleReport& r) {
    const auto& patterns = a.beliefs().patterns();
    if (patterns.empty()) return;
    std::map<std::string, int> counts;
    for (const auto& key : rig.seen_keys) counts[key] = 0;
    for (const auto& b : a.beliefs().beliefs())
      for (const auto& p : patterns)
        if (p.covers(b)) {
          std::string key = p.key_of(b);
          ++counts[key];
          rig.seen_keys.insert(key);
        }
    std::string text;
    for (const auto& [k, n] : counts)
      text += (text.empty() ? "" : ";") + k + "=" + std::to_string(n);
    if (!text.empty()) r.notes.emplace_back("unique", text);
  }

  void record_pose(RobotRig& r, long long t) {
    const auto& p = r.brick->body().pose();
    r.trace += format_pose({t, p.position.x(), p.position.y(), p.heading});
    r.trace += '\n';
  }

  bool robot_done(const RobotRig& r) const {
    const auto& body = r.brick->body();
    const auto& pose = body.pose();
    if (const auto* track = s_.world.line_track()) {
      sim::Vec2d mid = pose.position;
      int n = 0;
      sim::Vec2d sum = sim::Vec2d::Zero();
      for (const auto& m : body.sensors())
        if (m.kind == SensorKind::light) {
          sum += pose.to_world(m.offset);
          ++n;
        }
      if (n > 0) mid = sum / n;
      return track->path.project(mid).progress >= track->path.length() - 5.0;
    }
    if (const auto* c = s_.world.crossing()) {
      for (const auto& p : body.geometry().footprint.corners(pose))
        if (p.x() <= c->last_bar_end()) return false;
      return true;
    }
    return false;
  }

  void tick_robot(RobotRig& r, long long now, double dt) {
    r.brick->step(now, dt);
    r.brick->intake(now);
    r.brick->sample(now);
    record_pose(r, now);
    if (robot_done(r)) r.done = true;
  }

  void tick_agent(AgentRig& a, long long now) {
    if (a.agent->halted()) {
      a.halted = true;
      return;
    }
    if (!a.agent->ready()) return;
    auto report = a.agent->reasoning_cycle();
    a.log += format_cycle(now, report);
    a.log += '\n';
    if (a.agent->halted()) a.halted = true;
  }

  bool finished(long long now) {
    bool all_halted = std::all_of(agents_.begin(), agents_.end(),
                                  [](const auto& a) { return a->halted.load(); });
    if (all_halted) {
      completed_ = true;
      return true;
    }
    bool all_done = std::all_of(robots_.begin(), robots_.end(),
                                [](const auto& r) { return r->done.load(); });
    if (all_done && s_.world.kind() != sim::World::Kind::plain) {
      if (!done_at_) done_at_ = now;
      completed_ = true;
      return now - *done_at_ >= kGraceMs;
    }
    return false;
  }

  void run_lockstep() {
    while (now_ < max_time_ && !finished(now_)) {
      long long now = now_ + o_.tick_ms;
      now_ = now;
      for (auto& r : robots_) tick_robot(*r, now, static_cast<double>(o_.tick_ms));
      for (auto& a : agents_) tick_agent(*a, now);
    }
  }

  void run_threads() {
    std::mutex mu;
    std::condition_variable cv;
    long long tick = 0;
    bool stop = false;

    auto wait_tick = [&](long long& seen) {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return stop || tick > seen; });
      seen = tick;
      return !stop;
    };

    std::vector<std::thread> threads;
    for (auto& r : robots_)
      threads.emplace_back([&, rig = r.get()] {
        long long seen = 0, last = 0;
        while (wait_tick(seen)) {
          long long now = now_.load();
          if (now > last) tick_robot(*rig, now, static_cast<double>(now - last));
          last = now;
        }
      });
    for (auto& a : agents_)
      threads.emplace_back([&, rig = a.get()] {
        long long seen = 0;
        while (wait_tick(seen)) tick_agent(*rig, now_.load());
      });

    auto pause = std::chrono::duration<double, std::milli>(
        static_cast<double>(o_.tick_ms) / std::max(o_.time_scale, 1e-3));
    while (now_ < max_time_ && !finished(now_)) {
      std::this_thread::sleep_for(pause);
      {
        std::lock_guard lock(mu);
        now_ += o_.tick_ms;
        ++tick;
      }
      cv.notify_all();
    }
    {
      std::lock_guard lock(mu);
      stop = true;
    }
    cv.notify_all();
    for (auto& t : threads) t.join();
  }

  void write_outputs() {
    const fs::path& out = o_.out_dir;
    fs::create_directories(out);
    for (const char* sub : {"poses", "wire", "cycles"}) {
      fs::remove_all(out / sub);
      fs::create_directories(out / sub);
    }

    std::vector<std::string> robot_names, agent_names;
    for (auto& r : robots_) {
      robot_names.push_back(r->name);
      write_file(out / "poses" / (r->name + ".trace"), r->trace);
      std::string wire;
      for (const auto& rec : r->link->log()) wire += format_wire(rec) + "\n";
      write_file(out / "wire" / (r->name + ".log"), wire);
    }
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      auto& a = *agents_[i];
      const auto& name = a.config->name;
      agent_names.push_back(name);
      write_file(out / "cycles" / (name + ".log"), a.log);
      meta_["agent." + name + ".robot"] = a.robot->name;
      meta_["agent." + name + ".cycles"] = std::to_string(a.agent->cycle());

      const auto& ec = a.endpoint->counters();
      const auto& bc = a.robot->brick->counters();
      std::string robot = a.robot->name;
      meta_["robot." + robot + ".records"] =
          std::to_string(ec.sent + bc.acks + bc.percepts);
      meta_["robot." + robot + ".engine_sent"] = std::to_string(ec.sent);
      meta_["robot." + robot + ".engine_received"] = std::to_string(ec.received);
      meta_["robot." + robot + ".brick_acks"] = std::to_string(bc.acks);
      meta_["robot." + robot + ".brick_percepts"] = std::to_string(bc.percepts);
      meta_["robot." + robot + ".negative_acks"] =
          std::to_string(ec.negative_acks);
      std::string pending;
      for (auto id : a.endpoint->pending_ids())
        pending += (pending.empty() ? "" : ",") + std::to_string(id);
      meta_["robot." + robot + ".outstanding"] = pending;
    }
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
      return s;
    };
    meta_["agents"] = join(agent_names);
    meta_["robots"] = join(robot_names);
    meta_["mode"] = std::string(bridge::to_string(o_.mode));
    meta_["seed"] = std::to_string(seed_);
    meta_["tick_ms"] = std::to_string(o_.tick_ms);
    meta_["latency"] = latency_.describe();
    meta_["ack_timeout_ms"] = std::to_string(ack_timeout_);
    meta_["max_time_ms"] = std::to_string(max_time_);
    meta_["end_ms"] = std::to_string(now_.load());
    meta_["completed"] = completed_ ? "1" : "0";
    meta_["free_running"] = o_.free_running ? "1" : "0";
    meta_["world.kind"] = s_.world.name();
    meta_["internal_messages"] = std::to_string(router_.internal_messages());
    meta_["dropped_messages"] = std::to_string(router_.dropped());
    write_file(out / "run.meta", format_meta(meta_));
    write_file(out / "world.spec", s_.spec.to_text());
  }

  static constexpr long long kGraceMs = 200;

  const Scenario& s_;
  const RunOptions& o_;
  std::uint64_t seed_ = 42;
  bridge::LatencyModel latency_;
  long long max_time_ = 60000;
  long long ack_timeout_ = 1000;
  std::atomic<long long> now_{0};
  std::optional<long long> done_at_;
  bool completed_ = false;
  engine::MessageRouter router_;
  std::vector<std::unique_ptr<RobotRig>> robots_;
  std::vector<std::unique_ptr<AgentRig>> agents_;
  std::map<std::string, std::string> meta_;
};

}  // namespace

RunResult run_scenario(const Scenario& s, const RunOptions& options) {
  Runner runner(s, options);
  return runner.run();
}

RunVerdict replay(const fs::path& out_dir) {
  Artifacts a = load_artifacts(out_dir);
  RunVerdict v = evaluate(a);
  write_file(out_dir / "verdict.txt", v.to_text());
  return v;
}

}  // namespace nxtbdi::harness
