#include "nxtbdi/sim/robot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nxtbdi::sim {

using bridge::Verb;

Vec2d default_mount_offset(SensorKind kind, int port) {
  switch (kind) {
    case SensorKind::light:
      if (port == 1) return {60.0, 20.0};
      if (port == 2) return {60.0, -20.0};
      return {60.0, 0.0};
    case SensorKind::ultrasonic:
      return {30.0, 0.0};
    case SensorKind::touch:
      return {80.0, 0.0};
    case SensorKind::sound:
    case SensorKind::none:
      break;
  }
  return Vec2d::Zero();
}

RobotBody::RobotBody(BodyGeometry geometry, Pose2d start)
    : geometry_(geometry), pose_(start) {
  pose_.heading = normalize_angle(pose_.heading);
}

double RobotBody::arc_length(double degrees) const {
  return degrees / 360.0 * std::numbers::pi * geometry_.wheel_diameter;
}

bool RobotBody::rotating() const {
  return std::any_of(motors_.begin(), motors_.end(), [](const MotorState& m) {
    return m.mode == MotorMode::rotating;
  });
}

std::optional<bridge::Ack> RobotBody::apply_command(
    const bridge::ActionCommand& cmd) {
  for (auto m : cmd.motors)
    if (!motor(m).connected) return bridge::Ack{cmd.id, false};

  bool deferred = false;
  for (std::size_t k = 0; k < cmd.motors.size(); ++k) {
    MotorState& m = motor(cmd.motors[k]);
    long long arg = k < cmd.args.size() ? cmd.args[k] : 0;
    switch (cmd.verb) {
      case Verb::forward:
      case Verb::backward: {
        bool fwd = (cmd.verb == Verb::forward) == (arg >= 0);
        m.mode = fwd ? MotorMode::forward : MotorMode::backward;
        m.speed = std::abs(static_cast<double>(arg));
        m.rotation_target.reset();
        break;
      }
      case Verb::rotate:
        if (arg == 0) {
          m.mode = MotorMode::idle;
          m.rotation_target.reset();
        } else {
          m.mode = MotorMode::rotating;
          m.rotation_target = m.tacho + static_cast<double>(arg);
          deferred = blocking_rotate_;
        }
        break;
      case Verb::reverse:
        if (m.mode == MotorMode::forward)
          m.mode = MotorMode::backward;
        else if (m.mode == MotorMode::backward)
          m.mode = MotorMode::forward;
        break;
      case Verb::speed:
        m.speed = std::abs(static_cast<double>(arg));
        break;
      case Verb::stop:
        m.mode = MotorMode::idle;
        m.rotation_target.reset();
        break;
      case Verb::block:
        break;
    }
  }
  if (cmd.verb == Verb::block)
    blocking_rotate_ = !cmd.args.empty() && cmd.args[0] != 0;
  if (deferred) return std::nullopt;
  return bridge::Ack{cmd.id, true};
}

double RobotBody::advance(MotorState& m, double dt) {
  switch (m.mode) {
    case MotorMode::idle:
      return 0.0;
    case MotorMode::forward:
      m.tacho += m.speed * dt;
      return m.speed * dt;
    case MotorMode::backward:
      m.tacho -= m.speed * dt;
      return -m.speed * dt;
    case MotorMode::rotating: {
      double remaining = *m.rotation_target - m.tacho;
      double reach = m.speed * dt;
      double delta = std::clamp(remaining, -reach, reach);
      if (std::abs(remaining) <= reach) {
        m.tacho = *m.rotation_target;
        m.mode = MotorMode::idle;
        m.rotation_target.reset();
      } else {
        m.tacho += delta;
      }
      return delta;
    }
  }
  return 0.0;
}

void RobotBody::step(double dt) {
  double left = arc_length(advance(motors_[0], dt));
  double right = arc_length(advance(motors_[1], dt));
  advance(motors_[2], dt);

  double d = 0.5 * (left + right);
  double dtheta = (right - left) / geometry_.track_width;
  double mid = pose_.heading + 0.5 * dtheta;
  pose_.position += d * Vec2d(std::cos(mid), std::sin(mid));
  pose_.heading = normalize_angle(pose_.heading + dtheta);
}

}  // namespace nxtbdi::sim
