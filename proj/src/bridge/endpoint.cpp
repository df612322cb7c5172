#include "nxtbdi/bridge/endpoint.hpp"

#include <spdlog/spdlog.h>

namespace nxtbdi::bridge {

std::string_view to_string(Mode m) {
  return m == Mode::sync ? "sync" : "async";
}

Mode parse_mode(std::string_view text) {
  if (text == "sync") return Mode::sync;
  if (text == "async") return Mode::async;
  throw std::invalid_argument("mode must be sync or async, got '" +
                              std::string(text) + "'");
}

BridgeEndpoint::BridgeEndpoint(Mode mode, Link& link, Clock clock,
                               long long ack_timeout_ms)
    : mode_(mode),
      link_(link),
      clock_(std::move(clock)),
      ack_timeout_ms_(ack_timeout_ms) {}

void BridgeEndpoint::pump() {
  long long now = clock_();
  while (auto d = link_.poll(now)) {
    ++counters_.received;
    WireMessage msg;
    try {
      msg = from_wire(d->record);
    } catch (const WireFormatError& e) {
      ++counters_.malformed;
      spdlog::warn("bridge: dropping record: {}", e.what());
      continue;
    }
    if (auto* p = std::get_if<PerceptSample>(&msg)) {
      try {
        percepts_.push_back({decode_percept(*p), d->seq});
      } catch (const MalformedPercept& e) {
        ++counters_.malformed;
        spdlog::warn("bridge: skipping percept '{}': {}", d->record, e.what());
      }
    } else if (auto* k = std::get_if<Ack>(&msg)) {
      ++counters_.acks;
      ++acks_since_;
      if (!k->ok) {
        ++counters_.negative_acks;
        if (mode_ == Mode::async)
          spdlog::warn("bridge: robot rejected action {}", k->id);
      }
      auto it = pending_.find(k->id);
      if (it != pending_.end() && mode_ == Mode::async)
        pending_.erase(it);
      else if (it != pending_.end() && it->second.state == AckState::pending)
        it->second.state = k->ok ? AckState::ok : AckState::failed;
    } else {
      ++counters_.malformed;
      spdlog::warn("bridge: unexpected record from robot: {}", d->record);
    }
  }
}

std::vector<Percept> BridgeEndpoint::perceive() {
  pump();
  if (mode_ == Mode::sync) {
    while (percepts_.empty()) {
      if (link_.closed()) throw EndpointDown("robot link closed");
      link_.wait_for_traffic(std::chrono::milliseconds(1));
      pump();
    }
  }
  if (percepts_.empty() && link_.closed())
    throw EndpointDown("robot link closed");
  std::vector<Percept> out(std::make_move_iterator(percepts_.begin()),
                           std::make_move_iterator(percepts_.end()));
  percepts_.clear();
  return out;
}

std::uint64_t BridgeEndpoint::act(const Term& action) {
  if (exited_) throw EndpointDown("robot was told to exit");
  std::uint64_t id = next_id_;
  WireMessage msg = encode_action(action, id);
  long long now = clock_();
  link_.send(to_wire(msg), now);
  ++counters_.sent;
  if (std::holds_alternative<Exit>(msg)) {
    exited_ = true;
    return 0;
  }
  ++next_id_;
  ++counters_.actions;
  pending_[id] = {now, AckState::pending};
  return id;
}

AckState BridgeEndpoint::ack_state(std::uint64_t id) {
  pump();
  auto it = pending_.find(id);
  if (it == pending_.end()) return AckState::unknown;
  if (it->second.state == AckState::pending &&
      clock_() - it->second.sent_ms > ack_timeout_ms_)
    it->second.state = AckState::timed_out;
  return it->second.state;
}

void BridgeEndpoint::forget(std::uint64_t id) { pending_.erase(id); }

std::size_t BridgeEndpoint::outstanding_acks() {
  std::size_t n = 0;
  for (auto& [id, p] : pending_)
    if (ack_state(id) == AckState::pending) ++n;
  return n;
}

std::vector<std::uint64_t> BridgeEndpoint::pending_ids() {
  std::vector<std::uint64_t> out;
  for (auto& [id, p] : pending_)
    if (ack_state(id) == AckState::pending) out.push_back(id);
  return out;
}

bool BridgeEndpoint::ready() {
  pump();
  if (mode_ == Mode::async) return true;
  return !percepts_.empty() && outstanding_acks() == 0;
}

std::size_t BridgeEndpoint::queued_percepts() {
  pump();
  return percepts_.size();
}

bool BridgeEndpoint::down() {
  pump();
  return percepts_.empty() && link_.closed();
}

std::uint64_t BridgeEndpoint::take_acks_received() {
  return std::exchange(acks_since_, 0);
}

}  // namespace nxtbdi::bridge
