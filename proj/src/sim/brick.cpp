#include "nxtbdi/sim/brick.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace nxtbdi::sim {

NoiseModel NoiseModel::from_spec(const WorldSpec& spec) {
  NoiseModel n;
  n.light_sigma = spec.number("noise.light_sigma", n.light_sigma);
  n.spike_probability =
      spec.number("noise.spike_probability", n.spike_probability);
  n.spike_magnitude = spec.number("noise.spike_magnitude", n.spike_magnitude);
  n.sound_sigma = spec.number("noise.sound_sigma", n.sound_sigma);
  n.obstacle_jitter_steps = static_cast<int>(
      spec.integer("noise.obstacle_jitter_steps", n.obstacle_jitter_steps));
  if (n.light_sigma < 0 || n.sound_sigma < 0 || n.spike_probability < 0 ||
      n.spike_probability > 1 || n.obstacle_jitter_steps < 0)
    throw SpecError("noise parameters out of range");
  return n;
}

BodyGeometry body_from_spec(const WorldSpec& spec) {
  BodyGeometry g;
  g.wheel_diameter = spec.number("body.wheel_diameter", g.wheel_diameter);
  g.track_width = spec.number("body.track_width", g.track_width);
  g.footprint.front = spec.number("body.front", g.footprint.front);
  g.footprint.back = spec.number("body.back", g.footprint.back);
  g.footprint.half_width = spec.number("body.half_width", g.footprint.half_width);
  if (g.wheel_diameter <= 0 || g.track_width <= 0)
    throw SpecError("wheel diameter and track width must be > 0");
  if (g.footprint.front < 0 || g.footprint.back < 0 ||
      g.footprint.half_width <= 0)
    throw SpecError("body footprint must not be negative");
  return g;
}

long long quantize_ultrasonic(double mm) {
  double cm = mm / 10.0;
  long long q = 3 * std::llround(cm / 3.0);
  return std::clamp<long long>(q, 0, 255);
}

Brick::Brick(std::string name, RobotBody body, const World& world,
             bridge::Link& link, NoiseModel noise, std::uint64_t seed)
    : name_(std::move(name)),
      body_(std::move(body)),
      world_(world),
      link_(link),
      noise_(noise),
      rng_(seed) {}

void Brick::mount(int port, SensorKind kind, int sleep_ms, Vec2d offset,
                  std::size_t window) {
  SensorMount m;
  m.port = port;
  m.kind = kind;
  m.offset = offset;
  m.window = MedianWindow(window);
  m.sleep_ms = std::max(1, sleep_ms);
  m.next_sample_ms = static_cast<long long>(port - 1) * m.sleep_ms / 4;
  body_.sensors().push_back(m);
}

void Brick::step(long long now_ms, double dt_ms) {
  if (halted_) return;
  double left = dt_ms;
  while (left > 0) {
    double dt = std::min(left, 50.0);
    body_.step(dt / 1000.0);
    left -= dt;
  }
  if (deferred_ && !body_.rotating()) {
    send_ack({*deferred_, true}, now_ms);
    deferred_.reset();
    drain(now_ms);
  }
}

void Brick::intake(long long now_ms) {
  while (auto d = link_.poll(now_ms)) {
    if (halted_) continue;
    bridge::WireMessage msg;
    try {
      msg = bridge::from_wire(d->record);
    } catch (const std::exception& e) {
      ++counters_.malformed;
      spdlog::warn("{}: dropping record '{}': {}", name_, d->record, e.what());
      continue;
    }
    if (std::holds_alternative<bridge::Exit>(msg)) {
      halt();
      continue;
    }
    auto* cmd = std::get_if<bridge::ActionCommand>(&msg);
    if (!cmd) {
      ++counters_.malformed;
      spdlog::warn("{}: unexpected record '{}'", name_, d->record);
      continue;
    }
    ++counters_.commands;
    if (deferred_)
      queue_.push_back(*cmd);
    else
      execute(*cmd, now_ms);
  }
}

void Brick::execute(const bridge::ActionCommand& cmd, long long now_ms) {
  auto ack = body_.apply_command(cmd);
  if (ack)
    send_ack(*ack, now_ms);
  else
    deferred_ = cmd.id;
}

void Brick::drain(long long now_ms) {
  while (!deferred_ && !queue_.empty()) {
    auto cmd = queue_.front();
    queue_.pop_front();
    execute(cmd, now_ms);
  }
}

void Brick::send_ack(const bridge::Ack& ack, long long now_ms) {
  ++counters_.acks;
  if (!ack.ok) ++counters_.negative_acks;
  link_.send(bridge::to_wire(ack), now_ms);
}

void Brick::halt() {
  halted_ = true;
  for (auto m : {bridge::Motor::a, bridge::Motor::b, bridge::Motor::c}) {
    body_.motor(m).mode = MotorMode::idle;
    body_.motor(m).rotation_target.reset();
  }
  queue_.clear();
  deferred_.reset();
}

long long Brick::raw_reading(const SensorMount& m) {
  const Pose2d& pose = body_.pose();
  Vec2d at = pose.to_world(m.offset);
  switch (m.kind) {
    case SensorKind::light: {
      double v = world_.light_at(at);
      if (noise_.light_sigma > 0)
        v += std::normal_distribution<double>(0.0, noise_.light_sigma)(rng_);
      if (noise_.spike_probability > 0 &&
          std::bernoulli_distribution(noise_.spike_probability)(rng_))
        v += std::bernoulli_distribution(0.5)(rng_) ? noise_.spike_magnitude
                                                    : -noise_.spike_magnitude;
      return std::clamp<long long>(std::llround(v), 0, 1023);
    }
    case SensorKind::ultrasonic: {
      double d = world_.raycast(at, pose.forward(), 2550.0);
      long long cm = quantize_ultrasonic(d);
      if (d < 2550.0 && noise_.obstacle_jitter_steps > 0) {
        int j = std::uniform_int_distribution<int>(
            -noise_.obstacle_jitter_steps, noise_.obstacle_jitter_steps)(rng_);
        cm = std::clamp<long long>(cm + 3 * j, 0, 255);
      }
      return cm;
    }
    case SensorKind::touch:
      return world_.overlaps_obstacle(
                 body_.geometry().footprint.corners(pose))
                 ? 1
                 : 0;
    case SensorKind::sound: {
      double v = world_.ambient_sound();
      if (noise_.sound_sigma > 0)
        v += std::normal_distribution<double>(0.0, noise_.sound_sigma)(rng_);
      return std::clamp<long long>(std::llround(v), 0, 100);
    }
    case SensorKind::none:
      break;
  }
  return 0;
}

namespace {

std::optional<bridge::PerceptKind> percept_kind(SensorKind k) {
  switch (k) {
    case SensorKind::light: return bridge::PerceptKind::light;
    case SensorKind::ultrasonic: return bridge::PerceptKind::obstacle;
    case SensorKind::touch: return bridge::PerceptKind::touching;
    case SensorKind::sound: return bridge::PerceptKind::sound;
    case SensorKind::none: break;
  }
  return std::nullopt;
}

}  // namespace

void Brick::sample(long long now_ms) {
  if (halted_) return;
  for (auto& m : body_.sensors()) {
    auto kind = percept_kind(m.kind);
    if (!kind) continue;
    while (m.next_sample_ms <= now_ms) {
      m.window.push(raw_reading(m));
      m.next_sample_ms += m.sleep_ms;
      bridge::PerceptSample p{*kind, m.port, m.window.median()};
      link_.send(bridge::to_wire(p), now_ms);
      ++counters_.percepts;
    }
  }
}

}  // namespace nxtbdi::sim
