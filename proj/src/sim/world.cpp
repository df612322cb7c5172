#include "nxtbdi/sim/world.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <regex>
#include <sstream>

namespace nxtbdi::sim {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, std::string_view text) {
  std::string t = trim(text);
  double v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw SpecError("'" + key + "': expected a number, got '" + t + "'");
  return v;
}

}  // namespace

WorldSpec WorldSpec::parse(std::string_view text) {
  WorldSpec spec;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw SpecError("line " + std::to_string(line_no) +
                      ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw SpecError("line " + std::to_string(line_no) + ": empty key");
    spec.entries_.emplace_back(key, trim(t.substr(eq + 1)));
  }
  return spec;
}

void WorldSpec::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

bool WorldSpec::has(const std::string& key) const {
  return get(key).has_value();
}

std::optional<std::string> WorldSpec::get(const std::string& key) const {
  std::optional<std::string> out;
  for (const auto& [k, v] : entries_)
    if (k == key) out = v;
  return out;
}

std::vector<std::string> WorldSpec::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (k == key) out.push_back(v);
  return out;
}

std::string WorldSpec::get_or(const std::string& key,
                              const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double WorldSpec::number(const std::string& key, double fallback) const {
  auto v = get(key);
  return v ? to_double(key, *v) : fallback;
}

long long WorldSpec::integer(const std::string& key, long long fallback) const {
  double v = number(key, static_cast<double>(fallback));
  if (v != std::floor(v))
    throw SpecError("'" + key + "': expected an integer");
  return static_cast<long long>(v);
}

std::vector<double> WorldSpec::numbers(const std::string& key) const {
  std::vector<double> out;
  auto v = get(key);
  if (!v) return out;
  std::string_view s = *v;
  while (true) {
    auto comma = s.find(',');
    out.push_back(to_double(key, s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string WorldSpec::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

// ---------------------------------------------------------------------------

void Polyline::append(const Vec2d& p) {
  double add = points_.empty() ? 0.0 : (p - points_.back()).norm();
  cumulative_.push_back(cumulative_.empty() ? 0.0 : cumulative_.back() + add);
  points_.push_back(p);
}

Polyline::Projection Polyline::project(const Vec2d& p) const {
  Projection best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  if (points_.size() == 1) {
    best.distance = (p - points_[0]).norm();
    return best;
  }
  for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
    Vec2d a = points_[k], ab = points_[k + 1] - a;
    double len2 = ab.squaredNorm();
    double u = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    Vec2d q = a + u * ab;
    double d = (p - q).norm();
    if (d < best.distance) {
      double cross = ab.x() * (p - a).y() - ab.y() * (p - a).x();
      best = {d, cumulative_[k] + u * std::sqrt(len2), cross >= 0 ? d : -d};
    }
  }
  return best;
}

std::vector<TrackSegment> s_curve_segments() {
  using K = TrackSegment::Kind;
  return {{K::straight, 200, 0, 0},
          {K::arc, 0, 400, 60},
          {K::arc, 0, 400, -60},
          {K::straight, 200, 0, 0}};
}

std::pair<double, double> Crossing::bar(int i) const {
  double start = x0 + (i - 1) * 2.0 * bar_width;
  return {start, start + bar_width};
}

double World::light_at(const Vec2d& p) const {
  switch (kind_) {
    case Kind::plain:
      return plain_intensity_;
    case Kind::line_track:
      return track_.path.project(p).distance <= track_.half_width
                 ? shades_.dark
                 : shades_.bright;
    case Kind::crossing:
      for (int i = 1; i <= crossing_.bar_count; ++i) {
        auto [a, b] = crossing_.bar(i);
        if (p.x() >= a && p.x() < b) return shades_.dark;
      }
      return shades_.bright;
  }
  return shades_.bright;
}

double World::raycast(const Vec2d& origin, const Vec2d& dir,
                      double max_mm) const {
  double best = max_mm;
  for (const auto& box : obstacles_)
    if (auto t = ray_hit(origin, dir, box)) best = std::min(best, *t);
  return best;
}

bool World::overlaps_obstacle(const std::array<Vec2d, 4>& footprint) const {
  return std::any_of(obstacles_.begin(), obstacles_.end(),
                     [&](const Box2d& b) { return overlaps(footprint, b); });
}

double World::band_half_width() const {
  return track_.half_width + 2.0 * mount_lateral_;
}

namespace {

Polyline sample_path(const std::vector<TrackSegment>& segments, Vec2d start,
                     double heading) {
  constexpr double step = 2.0;
  Polyline path;
  Vec2d pos = start;
  path.append(pos);
  for (const auto& s : segments) {
    if (s.kind == TrackSegment::Kind::straight) {
      int n = std::max(1, static_cast<int>(std::ceil(s.length / step)));
      Vec2d dir(std::cos(heading), std::sin(heading));
      Vec2d from = pos;
      for (int k = 1; k <= n; ++k) path.append(from + dir * (s.length * k / n));
      pos = from + dir * s.length;
    } else {
      double sweep = s.angle_deg * std::numbers::pi / 180.0;
      double side = sweep >= 0 ? 1.0 : -1.0;
      Vec2d normal(-std::sin(heading), std::cos(heading));
      Vec2d centre = pos + side * s.radius * normal;
      double a0 = std::atan2(pos.y() - centre.y(), pos.x() - centre.x());
      int n = std::max(
          1, static_cast<int>(std::ceil(std::abs(sweep) * s.radius / step)));
      for (int k = 1; k <= n; ++k) {
        double a = a0 + sweep * k / n;
        path.append(centre + s.radius * Vec2d(std::cos(a), std::sin(a)));
      }
      pos = path.points().back();
      heading += sweep;
    }
  }
  return path;
}

TrackSegment parse_segment(const std::string& text) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  TrackSegment s;
  if (kind == "straight") {
    s.kind = TrackSegment::Kind::straight;
    if (!(in >> s.length) || s.length <= 0)
      throw SpecError("segment '" + text + "': expected straight LENGTH > 0");
  } else if (kind == "arc") {
    s.kind = TrackSegment::Kind::arc;
    if (!(in >> s.radius >> s.angle_deg) || s.radius <= 0)
      throw SpecError("segment '" + text +
                      "': expected arc RADIUS>0 ANGLE_DEG");
  } else {
    throw SpecError("segment '" + text + "': unknown kind '" + kind + "'");
  }
  return s;
}

}  // namespace

World build_world(const WorldSpec& spec) {
  World w;
  std::string kind = spec.get_or("kind", "plain");
  std::string preset = spec.get_or("preset", "");
  std::optional<int> preset_bars, preset_k;

  if (preset == "linetrack-s-curve") {
    kind = "line";
  } else if (!preset.empty()) {
    static const std::regex crossing_re(R"(crossing-(\d+)-bars-obstacle-at-(\d+))");
    std::smatch m;
    if (std::regex_match(preset, m, crossing_re)) {
      kind = "crossing";
      preset_bars = std::stoi(m[1]);
      preset_k = std::stoi(m[2]);
    } else if (preset != "plain") {
      throw SpecError("unknown preset '" + preset + "'");
    }
  }
  w.name_ = preset.empty() ? kind : preset;

  w.shades_.dark = spec.number("light.dark", 200);
  w.shades_.bright = spec.number("light.bright", 700);
  w.plain_intensity_ = spec.number("light.plain", w.shades_.bright);
  w.ambient_sound_ = spec.number("sound.ambient", 20);
  for (double v : {w.shades_.dark, w.shades_.bright, w.plain_intensity_})
    if (v < 0 || v > 1023)
      throw SpecError("light intensities must lie in [0, 1023]");

  if (kind == "line") {
    w.kind_ = World::Kind::line_track;
    auto segs = spec.get_all("segment");
    if (segs.empty()) {
      w.track_.segments = s_curve_segments();
    } else {
      for (const auto& s : segs) w.track_.segments.push_back(parse_segment(s));
    }
    w.track_.half_width = spec.number("line.half_width", 15);
    if (w.track_.half_width <= 0) throw SpecError("line.half_width must be > 0");
    w.mount_lateral_ = spec.number("line.mount_lateral", 20);
    auto origin = spec.numbers("line.origin");
    Vec2d start = origin.size() >= 2 ? Vec2d(origin[0], origin[1])
                                     : Vec2d::Zero();
    double heading =
        origin.size() >= 3 ? origin[2] * std::numbers::pi / 180.0 : 0.0;
    w.track_.path = sample_path(w.track_.segments, start, heading);
  } else if (kind == "crossing") {
    w.kind_ = World::Kind::crossing;
    Crossing& c = w.crossing_;
    c.bar_count = static_cast<int>(
        spec.integer("crossing.bars", preset_bars.value_or(6)));
    c.obstacle_after = static_cast<int>(
        spec.integer("crossing.obstacle_after", preset_k.value_or(2)));
    c.bar_width = spec.number("crossing.bar_width", 80);
    c.x0 = spec.number("crossing.x0", 150);
    c.lane_y = spec.number("crossing.lane_y", 0);
    if (c.bar_count < 1) throw SpecError("crossing needs at least one bar");
    if (c.bar_width <= 0) throw SpecError("crossing.bar_width must be > 0");
    if (c.obstacle_after < 1 || c.obstacle_after >= c.bar_count)
      throw SpecError("obstacle index " + std::to_string(c.obstacle_after) +
                      " out of range 1.." + std::to_string(c.bar_count - 1));
    double depth = spec.number("crossing.obstacle_depth", 40);
    double width = spec.number("crossing.obstacle_width", 160);
    if (depth <= 0 || width <= 0)
      throw SpecError("obstacle size must be positive");
    double s = c.bar(c.obstacle_after + 1).first;
    w.obstacles_.emplace_back(Vec2d(s, c.lane_y - width / 2),
                              Vec2d(s + depth, c.lane_y + width / 2));
  } else if (kind == "plain") {
    w.kind_ = World::Kind::plain;
  } else {
    throw SpecError("unknown world kind '" + kind + "'");
  }

  for (const auto& text : spec.get_all("obstacle")) {
    WorldSpec one;
    one.set("obstacle", text);
    auto v = one.numbers("obstacle");
    if (v.size() != 4 || v[0] >= v[2] || v[1] >= v[3])
      throw SpecError("obstacle '" + text + "': expected x0,y0,x1,y1 with x0<x1, y0<y1");
    w.obstacles_.emplace_back(Vec2d(v[0], v[1]), Vec2d(v[2], v[3]));
  }
  return w;
}

}  // namespace nxtbdi::sim
