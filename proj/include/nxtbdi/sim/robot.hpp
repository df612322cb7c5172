#pragma once

#include <array>
#include <optional>
#include <vector>

#include "nxtbdi/asl/project.hpp"
#include "nxtbdi/bridge/wire.hpp"
#include "nxtbdi/sim/geometry.hpp"
#include "nxtbdi/sim/median.hpp"

namespace nxtbdi::sim {

enum class MotorMode { idle, forward, backward, rotating };

struct MotorState {
  bool connected = true;
  MotorMode mode = MotorMode::idle;
  /// Degrees per second, always >= 0.
  double speed = 360.0;
  /// Absolute tacho value a rotation stops at.
  std::optional<double> rotation_target;
  /// Cumulative signed degrees turned.
  double tacho = 0.0;
};

struct SensorMount {
  int port = 1;
  SensorKind kind = SensorKind::none;
  /// (forward, left) offset from the body origin in mm.
  Vec2d offset = Vec2d::Zero();
  MedianWindow window{5};
  int sleep_ms = 50;
  long long next_sample_ms = 0;
};

struct BodyGeometry {
  double wheel_diameter = 56.0;
  double track_width = 120.0;
  Footprint footprint;
};

/// Default mount position for a sensor kind on a port.
Vec2d default_mount_offset(SensorKind kind, int port);

/// Differential-drive body: motor A drives the left wheel, motor B the right.
class RobotBody {
 public:
  explicit RobotBody(BodyGeometry geometry = {}, Pose2d start = {});

  /// Applies one command. Returns the acknowledgement when the command is
  /// complete now; a rotation issued while blocking is enabled completes
  /// later (see rotation_done()). A command naming a motor that is not
  /// connected is rejected with a negative acknowledgement.
  std::optional<bridge::Ack> apply_command(const bridge::ActionCommand& cmd);

  /// Advances the kinematics by `dt` seconds.
  void step(double dt);

  /// True while any motor is still turning towards a rotation target.
  bool rotating() const;

  const Pose2d& pose() const { return pose_; }
  void set_pose(const Pose2d& p) { pose_ = p; }
  const BodyGeometry& geometry() const { return geometry_; }
  MotorState& motor(bridge::Motor m) { return motors_[static_cast<int>(m)]; }
  const MotorState& motor(bridge::Motor m) const {
    return motors_[static_cast<int>(m)];
  }
  bool blocking_rotate() const { return blocking_rotate_; }

  std::vector<SensorMount>& sensors() { return sensors_; }
  const std::vector<SensorMount>& sensors() const { return sensors_; }

  /// Millimetres travelled by a wheel for `degrees` of motor rotation.
  double arc_length(double degrees) const;

 private:
  double advance(MotorState& m, double dt);

  BodyGeometry geometry_;
  Pose2d pose_;
  std::array<MotorState, 3> motors_;
  std::vector<SensorMount> sensors_;
  bool blocking_rotate_ = false;
};

}  // namespace nxtbdi::sim
