#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "nxtbdi/bridge/link.hpp"
#include "nxtbdi/bridge/wire.hpp"
#include "nxtbdi/term.hpp"

namespace nxtbdi::bridge {

enum class Mode { sync, async };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view text);

class ActionTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AckState { pending, ok, failed, timed_out, unknown };

/// A decoded percept plus the wire sequence number of the record carrying it.
struct Percept {
  Term term;
  std::uint64_t seq = 0;
};

struct BridgeCounters {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::uint64_t actions = 0;
  std::uint64_t acks = 0;
  std::uint64_t negative_acks = 0;
  std::uint64_t malformed = 0;
};

/// Engine side of the agent/robot boundary: the percept and action queues.
///
/// In sync mode perceive() waits for at least one percept and every action
/// stays outstanding until its ACK arrives (or the timeout passes). In async
/// mode nothing blocks; an action is pending until its ACK and then dropped.
class BridgeEndpoint {
 public:
  using Clock = std::function<long long()>;

  BridgeEndpoint(Mode mode, Link& link, Clock clock,
                 long long ack_timeout_ms = 1000);

  Mode mode() const { return mode_; }

  /// Drains the percept queue in arrival order. Throws EndpointDown when the
  /// link is gone and nothing is left.
  std::vector<Percept> perceive();

  /// Encodes and sends `action`; returns its id. Encode errors propagate
  /// (UnknownAction, MalformedAction); after `exit` every call throws
  /// EndpointDown.
  std::uint64_t act(const Term& action);

  /// Outcome of a sent action. Pending actions older than the timeout are
  /// reported as timed_out.
  AckState ack_state(std::uint64_t id);
  /// Stops tracking `id` (after the engine consumed its outcome).
  void forget(std::uint64_t id);

  /// Sync: a percept is queued and no action is awaiting its ACK.
  /// Async: always.
  bool ready();
  std::size_t queued_percepts();
  std::size_t outstanding_acks();
  /// Ids of actions still awaiting their ACK, ascending.
  std::vector<std::uint64_t> pending_ids();
  bool exited() const { return exited_; }
  bool down();

  /// Moves everything delivered so far into the local queues.
  void pump();

  const BridgeCounters& counters() const { return counters_; }
  /// ACK records received since the last call.
  std::uint64_t take_acks_received();

 private:
  struct Pending {
    long long sent_ms;
    AckState state;
  };

  Mode mode_;
  Link& link_;
  Clock clock_;
  long long ack_timeout_ms_;
  std::deque<Percept> percepts_;
  std::map<std::uint64_t, Pending> pending_;
  std::uint64_t next_id_ = 1;
  bool exited_ = false;
  BridgeCounters counters_;
  std::uint64_t acks_since_ = 0;
};

}  // namespace nxtbdi::bridge
