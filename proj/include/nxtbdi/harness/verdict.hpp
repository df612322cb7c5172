#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nxtbdi/harness/artifacts.hpp"

namespace nxtbdi::harness {

struct Criterion {
  std::string name;
  bool pass = false;
  /// Space separated key=value measurements.
  std::string measured;

  std::optional<double> value(const std::string& key) const;
};

struct RunVerdict {
  std::vector<Criterion> criteria;

  bool all_pass() const;
  const Criterion* find(const std::string& name) const;
  /// One `name<TAB>PASS|FAIL<TAB>measured` line per criterion.
  std::string to_text() const;
  static RunVerdict parse(const std::string& text);
};

/// Scenario criteria for the world kind recorded in the artifacts plus the
/// transport, mode and uniqueness checks every run gets.
RunVerdict evaluate(const Artifacts& a);

/// Minimum distance between a convex quad and a box; 0 when they overlap.
double clearance(const std::array<sim::Vec2d, 4>& quad, const sim::Box2d& box);

}  // namespace nxtbdi::harness
