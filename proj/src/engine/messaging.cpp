#include "nxtbdi/engine/messaging.hpp"

#include <spdlog/spdlog.h>

namespace nxtbdi::engine {

void Mailbox::push(MessageEnvelope m) {
  {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(m));
  }
  cv_.notify_all();
}

std::vector<MessageEnvelope> Mailbox::drain() {
  std::lock_guard lock(mu_);
  std::vector<MessageEnvelope> out(std::make_move_iterator(queue_.begin()),
                                   std::make_move_iterator(queue_.end()));
  queue_.clear();
  return out;
}

std::size_t Mailbox::size() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

bool Mailbox::wait_nonempty(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, timeout, [&] { return !queue_.empty(); });
}

void MessageRouter::register_agent(const std::string& name, Mailbox& box) {
  std::lock_guard lock(mu_);
  boxes_[name] = &box;
}

bool MessageRouter::registered(const std::string& name) const {
  std::lock_guard lock(mu_);
  return boxes_.count(name) != 0;
}

bool MessageRouter::deliver(MessageEnvelope m) {
  Mailbox* box = nullptr;
  {
    std::lock_guard lock(mu_);
    auto it = boxes_.find(m.receiver);
    if (it != boxes_.end()) box = it->second;
  }
  if (!box) {
    ++dropped_;
    spdlog::error("{}: no agent named '{}', dropping {}", m.sender, m.receiver,
                  to_string(m.content));
    return false;
  }
  box->push(std::move(m));
  ++delivered_;
  return true;
}

}  // namespace nxtbdi::engine
