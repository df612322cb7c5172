#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

namespace nxtbdi::sim {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

using Vec2d = Vec2<double>;
using Box2d = Eigen::AlignedBox<double, 2>;

/// Wraps to (-pi, pi].
template <typename Scalar>
Scalar normalize_angle(Scalar a) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  a = std::remainder(a, 2 * pi);
  if (a <= -pi) a += 2 * pi;
  return a;
}

/// Planar pose; x points forward at heading 0, y to the left.
template <typename Scalar>
struct Pose2 {
  Vec2<Scalar> position = Vec2<Scalar>::Zero();
  Scalar heading = 0;

  Eigen::Rotation2D<Scalar> rotation() const {
    return Eigen::Rotation2D<Scalar>(heading);
  }
  Vec2<Scalar> forward() const {
    return {std::cos(heading), std::sin(heading)};
  }
  /// Body frame (forward, left) to world frame.
  Vec2<Scalar> to_world(const Vec2<Scalar>& local) const {
    return position + rotation() * local;
  }
};

using Pose2d = Pose2<double>;

/// Rectangle around the body origin, in body coordinates.
struct Footprint {
  double front = 80.0;
  double back = 40.0;
  double half_width = 70.0;

  std::array<Vec2d, 4> corners(const Pose2d& pose) const {
    return {pose.to_world({front, half_width}), pose.to_world({-back, half_width}),
            pose.to_world({-back, -half_width}),
            pose.to_world({front, -half_width})};
  }
};

/// Separating-axis test between a convex quad and an axis-aligned box.
bool overlaps(const std::array<Vec2d, 4>& quad, const Box2d& box);

/// Distance along `dir` (unit) from `origin` to `box`, or nothing.
std::optional<double> ray_hit(const Vec2d& origin, const Vec2d& dir,
                              const Box2d& box);

}  // namespace nxtbdi::sim
