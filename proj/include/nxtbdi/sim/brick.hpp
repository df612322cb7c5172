#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>

#include "nxtbdi/bridge/link.hpp"
#include "nxtbdi/bridge/wire.hpp"
#include "nxtbdi/sim/robot.hpp"
#include "nxtbdi/sim/world.hpp"

namespace nxtbdi::sim {

struct NoiseModel {
  double light_sigma = 8.0;
  double spike_probability = 0.05;
  double spike_magnitude = 300.0;
  double sound_sigma = 3.0;
  /// Ultrasonic reading jitters by up to this many 3 cm steps.
  int obstacle_jitter_steps = 1;

  static NoiseModel none() { return {0, 0, 0, 0, 0}; }
  /// Reads `noise.*` keys, falling back to the defaults above.
  static NoiseModel from_spec(const WorldSpec& spec);
};

/// Reads `body.wheel_diameter`, `body.track_width` and `body.front`,
/// `body.back`, `body.half_width` (footprint), falling back to defaults.
BodyGeometry body_from_spec(const WorldSpec& spec);

/// Distance in mm to the reported centimetre value: nearest multiple of 3,
/// capped at 255.
long long quantize_ultrasonic(double mm);

struct BrickCounters {
  std::uint64_t commands = 0;
  std::uint64_t acks = 0;
  std::uint64_t negative_acks = 0;
  std::uint64_t percepts = 0;
  std::uint64_t malformed = 0;
};

/// Simulated NXT: applies wire commands to a body, samples its sensors in
/// `world` and sends median-filtered percepts back over `link`.
class Brick {
 public:
  Brick(std::string name, RobotBody body, const World& world,
        bridge::Link& link, NoiseModel noise, std::uint64_t seed);

  /// Mounts a sensor. The first sample of port p is taken at
  /// (p-1)*sleep_ms/4 so ports do not all fire in the same tick.
  void mount(int port, SensorKind kind, int sleep_ms, Vec2d offset,
             std::size_t window = 5);

  /// Advances physics by `dt_ms`, in sub-steps of at most 50 ms.
  void step(long long now_ms, double dt_ms);
  /// Applies every command the link delivers by `now_ms`.
  void intake(long long now_ms);
  /// Takes every sample due by `now_ms` and sends the percepts.
  void sample(long long now_ms);

  /// One noisy raw reading, before median filtering.
  long long raw_reading(const SensorMount& m);

  const std::string& name() const { return name_; }
  RobotBody& body() { return body_; }
  const RobotBody& body() const { return body_; }
  bool halted() const { return halted_; }
  bool awaiting_rotation() const { return deferred_.has_value(); }
  std::size_t queued_commands() const { return queue_.size(); }
  const BrickCounters& counters() const { return counters_; }

 private:
  void execute(const bridge::ActionCommand& cmd, long long now_ms);
  void drain(long long now_ms);
  void send_ack(const bridge::Ack& ack, long long now_ms);
  void halt();

  std::string name_;
  RobotBody body_;
  const World& world_;
  bridge::Link& link_;
  NoiseModel noise_;
  std::mt19937_64 rng_;
  std::optional<std::uint64_t> deferred_;
  std::deque<bridge::ActionCommand> queue_;
  bool halted_ = false;
  BrickCounters counters_;
};

}  // namespace nxtbdi::sim
