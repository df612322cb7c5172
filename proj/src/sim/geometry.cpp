#include "nxtbdi/sim/geometry.hpp"

#include <algorithm>
#include <limits>

namespace nxtbdi::sim {

namespace {

std::pair<double, double> project(const std::array<Vec2d, 4>& pts,
                                  const Vec2d& axis) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : pts) {
    double d = p.dot(axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

}  // namespace

bool overlaps(const std::array<Vec2d, 4>& quad, const Box2d& box) {
  std::array<Vec2d, 4> b = {box.corner(Box2d::BottomLeft),
                            box.corner(Box2d::BottomRight),
                            box.corner(Box2d::TopRight),
                            box.corner(Box2d::TopLeft)};
  std::array<Vec2d, 4> axes = {Vec2d::UnitX(), Vec2d::UnitY(),
                               (quad[1] - quad[0]).normalized(),
                               (quad[2] - quad[1]).normalized()};
  for (const auto& axis : axes) {
    auto [a0, a1] = project(quad, axis);
    auto [b0, b1] = project(b, axis);
    if (a1 < b0 || b1 < a0) return false;
  }
  return true;
}

std::optional<double> ray_hit(const Vec2d& origin, const Vec2d& dir,
                              const Box2d& box) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    if (std::abs(dir[k]) < 1e-12) {
      if (origin[k] < box.min()[k] || origin[k] > box.max()[k])
        return std::nullopt;
      continue;
    }
    double a = (box.min()[k] - origin[k]) / dir[k];
    double b = (box.max()[k] - origin[k]) / dir[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

}  // namespace nxtbdi::sim
