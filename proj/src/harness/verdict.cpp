#include "nxtbdi/harness/verdict.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "nxtbdi/sim/brick.hpp"

namespace nxtbdi::harness {

using sim::Vec2d;

std::optional<double> Criterion::value(const std::string& key) const {
  std::istringstream in(measured);
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || tok.substr(0, eq) != key) continue;
    try {
      return std::stod(tok.substr(eq + 1));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool RunVerdict::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const Criterion& c) { return c.pass; });
}

const Criterion* RunVerdict::find(const std::string& name) const {
  for (const auto& c : criteria)
    if (c.name == name) return &c;
  return nullptr;
}

std::string RunVerdict::to_text() const {
  std::string out;
  for (const auto& c : criteria)
    out += c.name + "\t" + (c.pass ? "PASS" : "FAIL") + "\t" + c.measured + "\n";
  return out;
}

RunVerdict RunVerdict::parse(const std::string& text) {
  RunVerdict v;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto a = line.find('\t');
    auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos)
      throw std::runtime_error("bad verdict line: " + line);
    v.criteria.push_back({line.substr(0, a),
                          line.substr(a + 1, b - a - 1) == "PASS",
                          line.substr(b + 1)});
  }
  return v;
}

namespace {

double segment_distance(const Vec2d& p, const Vec2d& a, const Vec2d& b) {
  Vec2d ab = b - a;
  double len2 = ab.squaredNorm();
  double u = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + u * ab)).norm();
}

sim::Pose2d pose_of(const PoseSample& s) {
  sim::Pose2d p;
  p.position = {s.x, s.y};
  p.heading = s.heading;
  return p;
}

std::string fmt_mm(double v) { return fmt::format("{:.3f}", v); }

std::vector<Mount> light_mounts(const Artifacts& a, const std::string& robot) {
  std::vector<Mount> out;
  for (auto& m : a.mounts(robot))
    if (m.kind == "light") out.push_back(m);
  return out;
}

// ---------------------------------------------------------------------------
// line track

void line_track(const Artifacts& a, const sim::World& world, RunVerdict& v) {
  const auto& track = *world.line_track();
  double length = track.path.length();
  double band = world.band_half_width();
  for (const auto& robot : a.robots()) {
    const auto& poses = a.poses.at(robot);
    auto mounts = light_mounts(a, robot);

    double best_progress = 0;
    std::optional<long long> end_t;
    double max_lateral = 0;
    long long max_out = 0;
    std::vector<std::optional<long long>> out_since(mounts.size());
    long long last_t = 0;

    for (const auto& s : poses) {
      if (end_t) break;
      sim::Pose2d pose = pose_of(s);
      last_t = s.t;
      Vec2d mid = pose.position;
      if (!mounts.empty()) {
        mid = Vec2d::Zero();
        for (const auto& m : mounts) mid += pose.to_world({m.forward, m.lateral});
        mid /= static_cast<double>(mounts.size());
      }
      auto pm = track.path.project(mid);
      best_progress = std::max(best_progress, pm.progress);
      max_lateral =
          std::max(max_lateral, track.path.project(pose.position).distance);

      for (std::size_t k = 0; k < mounts.size(); ++k) {
        Vec2d at = pose.to_world({mounts[k].forward, mounts[k].lateral});
        bool out = track.path.project(at).distance > band;
        if (out && !out_since[k]) out_since[k] = s.t;
        if (!out && out_since[k]) {
          max_out = std::max(max_out, s.t - *out_since[k]);
          out_since[k].reset();
        }
      }
      if (pm.progress >= length - 5.0) end_t = s.t;
    }
    for (auto& since : out_since)
      if (since) max_out = std::max(max_out, last_t - *since);

    v.criteria.push_back(
        {"track_end_reached:" + robot, end_t.has_value(),
         fmt::format("progress_mm={} length_mm={} end_ms={}",
                     fmt_mm(best_progress), fmt_mm(length),
                     end_t ? std::to_string(*end_t) : "none")});
    v.criteria.push_back(
        {"line_band:" + robot, max_out <= 500 && !mounts.empty(),
         fmt::format("max_out_ms={} band_mm={} max_lateral_mm={}", max_out,
                     fmt_mm(band), fmt_mm(max_lateral))});
  }
}

// ---------------------------------------------------------------------------
// crossing

struct SendNote {
  std::string agent;
  std::string receiver;
  std::string content;
  std::string robot;
  std::uint64_t seq = 0;
  long long t = 0;
};

std::optional<SendNote> parse_send(const std::string& agent,
                                   const std::string& v, long long t) {
  auto p1 = v.find('|');
  auto p2 = p1 == std::string::npos ? p1 : v.find('|', p1 + 1);
  if (p2 == std::string::npos) return std::nullopt;
  SendNote s{agent, v.substr(0, p1), v.substr(p1 + 1, p2 - p1 - 1), "", 0, t};
  std::string origin = v.substr(p2 + 1);
  auto hash = origin.rfind('#');
  if (hash == std::string::npos) return std::nullopt;
  s.robot = origin.substr(0, hash);
  s.seq = std::stoull(origin.substr(hash + 1));
  return s;
}

void crossing(const Artifacts& a, const sim::World& world, RunVerdict& v) {
  const auto& c = *world.crossing();
  int k = c.obstacle_after;
  std::string expected = fmt::format("obstacle_after({})", k);

  std::vector<SendNote> sends;
  std::size_t recvs = 0;
  for (const auto& agent : a.agents())
    for (const auto& line : a.cycles.at(agent)) {
      for (const auto& n : line.notes("send"))
        if (auto s = parse_send(agent, n, line.t);
            s && s->content.rfind("obstacle_after(", 0) == 0)
          sends.push_back(*s);
      for (const auto& n : line.notes("recv"))
        if (n.find("|obstacle_after(") != std::string::npos) ++recvs;
    }

  v.criteria.push_back(
      {"obstacle_reported_once",
       sends.size() == 1 && sends[0].content == expected,
       fmt::format("sends={} value={} expected={}", sends.size(),
                   sends.empty() ? "none" : sends[0].content, expected)});

  // Adoption of !avoid by the receiving agent.
  {
    bool pass = false;
    std::string measured = "receiver=none";
    if (sends.size() == 1 && a.cycles.count(sends[0].receiver)) {
      const auto& cycles = a.cycles.at(sends[0].receiver);
      std::string reach_step = fmt::format("-+bars_passed({})", k);
      std::string reach_event = fmt::format("+bars_passed({})", k);
      std::optional<std::uint64_t> recv_c, reach_c, adopt_c, avoid_c;
      for (const auto& line : cycles) {
        auto cyc = line.report.cycle;
        for (const auto& n : line.notes("recv"))
          if (!recv_c && n.find("|" + expected) != std::string::npos)
            recv_c = cyc;
        for (const auto& n : line.notes("step"))
          if (!reach_c && n == reach_step) reach_c = cyc;
        auto events = line.notes("event");
        auto plans = line.notes("plan");
        for (const auto& e : events) {
          if (!adopt_c && e.rfind(reach_event, 0) == 0 &&
              std::find(plans.begin(), plans.end(), "+bars_passed(N)") !=
                  plans.end())
            adopt_c = cyc;
          if (!avoid_c && e.rfind("+!avoid", 0) == 0) avoid_c = cyc;
        }
      }
      auto str = [](const std::optional<std::uint64_t>& x) {
        return x ? std::to_string(*x) : std::string("none");
      };
      long long delta = (reach_c && adopt_c)
                            ? static_cast<long long>(*adopt_c) -
                                  static_cast<long long>(*reach_c)
                            : -1;
      pass = recv_c && reach_c && adopt_c && avoid_c && *recv_c < *adopt_c &&
             delta >= 1 && delta <= 2 && *avoid_c > *adopt_c;
      measured = fmt::format(
          "receiver={} recv_cycle={} reach_cycle={} adopt_cycle={} "
          "avoid_cycle={} delta_cycles={}",
          sends[0].receiver, str(recv_c), str(reach_c), str(adopt_c),
          str(avoid_c), delta);
    }
    v.criteria.push_back({"avoid_adoption", pass, measured});
  }

  // Footprint clearance and passing the final bar.
  sim::BodyGeometry body = sim::body_from_spec(a.world_spec);
  double min_clear = std::numeric_limits<double>::infinity();
  std::string pass_times;
  bool all_passed = !a.robots().empty();
  for (const auto& robot : a.robots()) {
    std::optional<long long> passed;
    for (const auto& s : a.poses.at(robot)) {
      auto corners = body.footprint.corners(pose_of(s));
      for (const auto& box : world.obstacles())
        min_clear = std::min(min_clear, clearance(corners, box));
      double rear = std::numeric_limits<double>::infinity();
      for (const auto& p : corners) rear = std::min(rear, p.x());
      if (!passed && rear > c.last_bar_end()) passed = s.t;
    }
    all_passed = all_passed && passed.has_value();
    pass_times += fmt::format(" {}_ms={}", robot,
                              passed ? std::to_string(*passed) : "none");
  }
  v.criteria.push_back({"no_collision", min_clear > 0,
                        "min_clearance_mm=" + fmt_mm(min_clear)});
  v.criteria.push_back({"final_bar_passed", all_passed,
                        fmt::format("last_bar_end_mm={}{}",
                                    fmt_mm(c.last_bar_end()), pass_times)});

  // Transport vs internal messages for the obstacle report.
  std::size_t transport = 0, mentions = 0;
  for (const auto& robot : a.robots())
    for (const auto& w : a.wire.at(robot)) {
      if (w.record.find("obstacle_after") != std::string::npos) ++mentions;
      for (const auto& s : sends)
        if (s.robot == robot && w.seq == s.seq &&
            w.dir == bridge::Direction::to_engine &&
            w.record.rfind("P|OBSTACLE|", 0) == 0)
          ++transport;
    }
  std::size_t internal = std::stoull(a.meta_or("internal_messages", "0"));
  v.criteria.push_back(
      {"shared_percept_messages",
       sends.size() == 1 && transport == 1 && recvs == 1 && internal == 1 &&
           mentions == 0,
       fmt::format("transport={} internal={} received={} wire_mentions={}",
                   transport, internal, recvs, mentions)});
}

// ---------------------------------------------------------------------------
// checks every run gets

void transport_counter(const Artifacts& a, RunVerdict& v) {
  bool pass = true;
  std::string measured;
  for (const auto& robot : a.robots()) {
    auto counted = std::stoull(a.meta_or("robot." + robot + ".records", "0"));
    auto logged = a.wire.at(robot).size();
    pass = pass && counted == logged;
    measured += fmt::format("{}{}_counter={} {}_logged={}",
                            measured.empty() ? "" : " ", robot, counted, robot,
                            logged);
  }
  v.criteria.push_back(
      {"transport_counter", pass, measured.empty() ? "robots=0" : measured});
}

void mode_contract(const Artifacts& a, RunVerdict& v) {
  std::string mode = a.meta_or("mode", "sync");
  std::size_t empty = 0, cycles = 0;
  for (const auto& agent : a.agents())
    for (const auto& line : a.cycles.at(agent)) {
      ++cycles;
      if (line.report.percept_queue_empty) ++empty;
    }
  bool pass = mode == "sync" ? empty == 0 : (cycles == 0 || empty > 0);
  v.criteria.push_back(
      {"mode_contract", pass,
       fmt::format("mode={} cycles={} empty_queue_cycles={}", mode, cycles,
                   empty)});
}

std::optional<std::uint64_t> record_id(const std::string& record, char tag) {
  if (record.size() < 3 || record[0] != tag || record[1] != '|')
    return std::nullopt;
  auto end = record.find('|', 2);
  try {
    return std::stoull(record.substr(2, end == std::string::npos
                                            ? std::string::npos
                                            : end - 2));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void ack_pairing(const Artifacts& a, RunVerdict& v) {
  bool sync = a.meta_or("mode", "sync") == "sync";
  bool pass = true;
  std::size_t actions = 0, acks = 0, unpaired = 0, outstanding_n = 0;
  for (const auto& robot : a.robots()) {
    std::set<std::uint64_t> outstanding;
    std::istringstream in(a.meta_or("robot." + robot + ".outstanding", ""));
    std::string id;
    while (std::getline(in, id, ','))
      if (!id.empty()) outstanding.insert(std::stoull(id));
    outstanding_n += outstanding.size();

    std::map<std::uint64_t, int> count;
    std::set<std::uint64_t> sent;
    for (const auto& w : a.wire.at(robot)) {
      if (w.dir == bridge::Direction::to_robot) {
        if (auto i = record_id(w.record, 'A')) {
          sent.insert(*i);
          ++actions;
        }
      } else if (auto i = record_id(w.record, 'K')) {
        ++count[*i];
        ++acks;
      }
    }
    for (auto i : sent) {
      int n = count.count(i) ? count[i] : 0;
      bool ok = n == 1 || (n == 0 && (!sync || outstanding.count(i)));
      if (!ok) {
        ++unpaired;
        pass = false;
      }
    }
    for (auto& [i, n] : count)
      if (!sent.count(i) || n > 1) {
        ++unpaired;
        pass = false;
      }
  }
  v.criteria.push_back(
      {"ack_pairing", pass,
       fmt::format("actions={} acks={} unpaired={} outstanding_at_end={}",
                   actions, acks, unpaired, outstanding_n)});
}

void unique_beliefs(const Artifacts& a, bool strict, RunVerdict& v) {
  bool pass = true;
  std::size_t checked = 0;
  long long max_count = 0;
  for (const auto& agent : a.agents()) {
    std::set<std::string> seen;
    for (const auto& line : a.cycles.at(agent)) {
      auto notes = line.notes("unique");
      if (notes.empty()) continue;
      ++checked;
      std::istringstream in(notes.front());
      std::string item;
      while (std::getline(in, item, ';')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        std::string key = item.substr(0, eq);
        long long n = std::stoll(item.substr(eq + 1));
        max_count = std::max(max_count, n);
        if (n > 1) pass = false;
        if (strict && seen.count(key) && n != 1) pass = false;
        if (n > 0) seen.insert(key);
      }
    }
  }
  std::size_t light1 = 0;
  for (const auto& robot : a.robots())
    for (const auto& w : a.wire.at(robot))
      if (w.dir == bridge::Direction::to_engine &&
          w.record.rfind("P|LIGHT|1|", 0) == 0)
        ++light1;
  v.criteria.push_back(
      {"unique_beliefs", pass,
       fmt::format("checked_cycles={} max_per_key={} strict={} "
                   "light1_percepts={}",
                   checked, max_count, strict ? 1 : 0, light1)});
}

}  // namespace

double clearance(const std::array<Vec2d, 4>& quad, const sim::Box2d& box) {
  if (sim::overlaps(quad, box)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : quad) best = std::min(best, box.exteriorDistance(p));
  std::array<Vec2d, 4> corners = {
      box.corner(sim::Box2d::BottomLeft), box.corner(sim::Box2d::BottomRight),
      box.corner(sim::Box2d::TopRight), box.corner(sim::Box2d::TopLeft)};
  for (const auto& p : corners)
    for (std::size_t k = 0; k < 4; ++k)
      best = std::min(best, segment_distance(p, quad[k], quad[(k + 1) % 4]));
  return best;
}

RunVerdict evaluate(const Artifacts& a) {
  RunVerdict v;
  sim::World world = sim::build_world(a.world_spec);
  switch (world.kind()) {
    case sim::World::Kind::line_track:
      line_track(a, world, v);
      break;
    case sim::World::Kind::crossing:
      crossing(a, world, v);
      break;
    case sim::World::Kind::plain:
      break;
  }
  unique_beliefs(a, world.kind() == sim::World::Kind::plain, v);
  transport_counter(a, v);
  mode_contract(a, v);
  ack_pairing(a, v);
  return v;
}

}  // namespace nxtbdi::harness
