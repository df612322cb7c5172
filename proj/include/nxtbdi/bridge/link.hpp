#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nxtbdi::bridge {

class EndpointDown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Delivery {
  std::uint64_t seq = 0;
  std::string record;
};

/// One side of a bidirectional record channel. Times are simulated
/// milliseconds; transports without a notion of delay ignore them.
class Link {
 public:
  virtual ~Link() = default;

  /// Queues `record` for the peer and returns its sequence number.
  virtual std::uint64_t send(const std::string& record, long long now_ms) = 0;
  /// Next record whose delivery time has come, if any.
  virtual std::optional<Delivery> poll(long long now_ms) = 0;
  virtual void close() = 0;
  /// True once either side closed and nothing remains to deliver.
  virtual bool closed() const = 0;
  /// Gives other threads a chance to produce traffic.
  virtual void wait_for_traffic(std::chrono::milliseconds max_wait);
};

/// Fixed delay plus uniform jitter, in milliseconds.
struct LatencyModel {
  double fixed_ms = 30.0;
  double jitter_ms = 20.0;

  /// Accepts "30", "30+-20", "30±20" or "30:20".
  static LatencyModel parse(std::string_view text);
  std::string describe() const;
};

enum class Direction { to_robot, to_engine };

struct WireRecord {
  long long sent_ms = 0;
  long long due_ms = 0;
  std::uint64_t seq = 0;
  Direction dir = Direction::to_robot;
  std::string text;
};

/// In-process transport standing in for Bluetooth. Each direction is FIFO:
/// a record never overtakes an earlier one even when its own jitter is
/// smaller. Sequence numbers are shared by both directions.
class SimulatedLink {
 public:
  class End : public Link {
   public:
    std::uint64_t send(const std::string& record, long long now_ms) override;
    std::optional<Delivery> poll(long long now_ms) override;
    void close() override;
    bool closed() const override;
    void wait_for_traffic(std::chrono::milliseconds max_wait) override;

   private:
    friend class SimulatedLink;
    End(SimulatedLink& owner, Direction outgoing)
        : owner_(owner), outgoing_(outgoing) {}
    SimulatedLink& owner_;
    Direction outgoing_;
  };

  SimulatedLink(LatencyModel latency, std::uint64_t seed);
  SimulatedLink(const SimulatedLink&) = delete;
  SimulatedLink& operator=(const SimulatedLink&) = delete;

  End& engine_end() { return engine_; }
  End& robot_end() { return robot_; }

  /// Every record ever sent, in send order.
  std::vector<WireRecord> log() const;
  std::size_t in_flight() const;
  const LatencyModel& latency() const { return latency_; }

 private:
  struct Queue {
    std::deque<WireRecord> items;
    long long last_due = 0;
  };

  std::uint64_t push(Direction dir, const std::string& record, long long now);
  std::optional<Delivery> pop(Direction dir, long long now);

  LatencyModel latency_;
  mutable std::mutex mu_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> jitter_{-1.0, 1.0};
  Queue to_robot_;
  Queue to_engine_;
  std::vector<WireRecord> log_;
  std::uint64_t next_seq_ = 1;
  bool closed_ = false;
  End engine_{*this, Direction::to_robot};
  End robot_{*this, Direction::to_engine};
};

/// Newline-delimited records over a connected Unix-domain stream socket.
/// Sequence numbers are local to this end.
class StreamSocketLink : public Link {
 public:
  explicit StreamSocketLink(int fd);
  ~StreamSocketLink() override;
  StreamSocketLink(const StreamSocketLink&) = delete;
  StreamSocketLink& operator=(const StreamSocketLink&) = delete;

  /// Socket path for a brick name inside `dir`.
  static std::string socket_path(const std::string& dir,
                                 const std::string& btname);
  /// Binds `path`, accepts exactly one connection and returns it.
  static StreamSocketLink accept_one(const std::string& path);
  static StreamSocketLink connect_to(const std::string& path);
  /// Two connected ends, for tests.
  static std::pair<StreamSocketLink, StreamSocketLink> pair();

  StreamSocketLink(StreamSocketLink&& other) noexcept;

  std::uint64_t send(const std::string& record, long long now_ms) override;
  std::optional<Delivery> poll(long long now_ms) override;
  void close() override;
  bool closed() const override;
  void wait_for_traffic(std::chrono::milliseconds max_wait) override;

 private:
  void fill();

  int fd_ = -1;
  std::string buffer_;
  bool eof_ = false;
  std::uint64_t next_seq_ = 1;
};

}  // namespace nxtbdi::bridge
