#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nxtbdi/sim/geometry.hpp"

namespace nxtbdi::sim {

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `key = value` lines; `#` starts a comment. Keys may repeat (segments,
/// obstacles); lookups return the last value.
class WorldSpec {
 public:
  static WorldSpec parse(std::string_view text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;
  std::vector<std::string> get_all(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  /// Comma separated numbers, e.g. "0,0,90".
  std::vector<double> numbers(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  std::string to_text() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Light intensities of the two floor materials (0-1023 raw scale).
struct FloorShades {
  double dark = 200.0;
  double bright = 700.0;
};

/// Centre line of a track, sampled densely.
class Polyline {
 public:
  void append(const Vec2d& p);
  double length() const { return cumulative_.empty() ? 0 : cumulative_.back(); }
  const std::vector<Vec2d>& points() const { return points_; }

  struct Projection {
    double distance;  // unsigned distance to the line
    double progress;  // arc length of the closest point
    double signed_offset;  // positive to the left of travel
  };
  Projection project(const Vec2d& p) const;

 private:
  std::vector<Vec2d> points_;
  std::vector<double> cumulative_;
};

struct TrackSegment {
  enum class Kind { straight, arc } kind = Kind::straight;
  double length = 0;       // straight: mm
  double radius = 0;       // arc: mm
  double angle_deg = 0;    // arc: positive turns left
};

struct LineTrack {
  std::vector<TrackSegment> segments;
  double half_width = 15.0;
  Polyline path;
};

struct Crossing {
  double x0 = 150.0;
  double bar_width = 80.0;
  int bar_count = 6;
  int obstacle_after = 2;
  double lane_y = 0.0;

  /// [start, end) of bar i along x, i counted from 1.
  std::pair<double, double> bar(int i) const;
  double last_bar_end() const { return bar(bar_count).second; }
};

class World {
 public:
  enum class Kind { plain, line_track, crossing };

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  /// Floor intensity before sensor noise, in [0, 1023].
  double light_at(const Vec2d& p) const;
  /// Distance in mm to the first obstacle along `dir`, capped at `max_mm`.
  double raycast(const Vec2d& origin, const Vec2d& dir, double max_mm) const;
  bool overlaps_obstacle(const std::array<Vec2d, 4>& footprint) const;

  const std::vector<Box2d>& obstacles() const { return obstacles_; }
  const FloorShades& shades() const { return shades_; }
  double ambient_sound() const { return ambient_sound_; }
  const LineTrack* line_track() const {
    return kind_ == Kind::line_track ? &track_ : nullptr;
  }
  const Crossing* crossing() const {
    return kind_ == Kind::crossing ? &crossing_ : nullptr;
  }

  /// Mount positions whose distance to the line centre stays within this
  /// bound count as inside the line band.
  double band_half_width() const;

 private:
  friend World build_world(const WorldSpec& spec);

  Kind kind_ = Kind::plain;
  std::string name_ = "plain";
  FloorShades shades_;
  double plain_intensity_ = 700.0;
  double ambient_sound_ = 20.0;
  double mount_lateral_ = 20.0;
  LineTrack track_;
  Crossing crossing_;
  std::vector<Box2d> obstacles_;
};

/// Expands presets (`linetrack-s-curve`,
/// `crossing-<N>-bars-obstacle-at-<K>`) and explicit geometry into a world.
/// Throws SpecError for invalid geometry.
World build_world(const WorldSpec& spec);

/// The s-curve: straight 200, arc R400 +60deg, arc R400 -60deg, straight 200.
std::vector<TrackSegment> s_curve_segments();

}  // namespace nxtbdi::sim
