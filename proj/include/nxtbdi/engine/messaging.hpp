#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "nxtbdi/term.hpp"

namespace nxtbdi::engine {

enum class Performative { tell };

struct MessageEnvelope {
  std::string sender;
  std::string receiver;
  Performative performative = Performative::tell;
  Term content;
  /// Wire sequence of the percept that led to this message, 0 if none.
  std::uint64_t origin_seq = 0;
};

/// FIFO inbox safe for concurrent producers.
class Mailbox {
 public:
  void push(MessageEnvelope m);
  std::vector<MessageEnvelope> drain();
  std::size_t size() const;
  bool wait_nonempty(std::chrono::milliseconds timeout);

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<MessageEnvelope> queue_;
};

/// Name registry for in-engine message routing. Deliveries are internal
/// messages: they never touch a robot link.
class MessageRouter {
 public:
  void register_agent(const std::string& name, Mailbox& box);
  bool registered(const std::string& name) const;

  /// Appends to the receiver's mailbox. Unknown receivers are logged and the
  /// message is dropped; returns whether it was delivered.
  bool deliver(MessageEnvelope m);

  std::uint64_t internal_messages() const { return delivered_.load(); }
  std::uint64_t dropped() const { return dropped_.load(); }

 private:
  mutable std::mutex mu_;
  std::map<std::string, Mailbox*> boxes_;
  std::atomic<std::uint64_t> delivered_{0};
  std::atomic<std::uint64_t> dropped_{0};
};

}  // namespace nxtbdi::engine
