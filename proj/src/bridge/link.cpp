#include "nxtbdi/bridge/link.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <thread>

namespace nxtbdi::bridge {

void Link::wait_for_traffic(std::chrono::milliseconds max_wait) {
  std::this_thread::sleep_for(max_wait);
}

LatencyModel LatencyModel::parse(std::string_view text) {
  auto number = [&](std::string_view s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 0)
      throw std::invalid_argument("bad latency '" + std::string(text) +
                                  "', expected MS or MS+-JITTER");
    return v;
  };
  for (std::string_view sep : {"±", "+-", ":"}) {
    auto p = text.find(sep);
    if (p != std::string_view::npos)
      return {number(text.substr(0, p)), number(text.substr(p + sep.size()))};
  }
  return {number(text), 0.0};
}

std::string LatencyModel::describe() const {
  auto fmt = [](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  };
  return fmt(fixed_ms) + "+-" + fmt(jitter_ms);
}

SimulatedLink::SimulatedLink(LatencyModel latency, std::uint64_t seed)
    : latency_(latency), rng_(seed) {}

std::uint64_t SimulatedLink::push(Direction dir, const std::string& record,
                                  long long now) {
  std::lock_guard lock(mu_);
  if (closed_) throw EndpointDown("link closed");
  Queue& q = dir == Direction::to_robot ? to_robot_ : to_engine_;
  double delay = latency_.fixed_ms + latency_.jitter_ms * jitter_(rng_);
  long long due = now + std::max(0LL, std::llround(delay));
  due = std::max(due, q.last_due);
  q.last_due = due;
  WireRecord r{now, due, next_seq_++, dir, record};
  q.items.push_back(r);
  log_.push_back(std::move(r));
  return log_.back().seq;
}

std::optional<Delivery> SimulatedLink::pop(Direction dir, long long now) {
  std::lock_guard lock(mu_);
  Queue& q = dir == Direction::to_robot ? to_robot_ : to_engine_;
  if (q.items.empty() || q.items.front().due_ms > now) return std::nullopt;
  Delivery d{q.items.front().seq, std::move(q.items.front().text)};
  q.items.pop_front();
  return d;
}

std::vector<WireRecord> SimulatedLink::log() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t SimulatedLink::in_flight() const {
  std::lock_guard lock(mu_);
  return to_robot_.items.size() + to_engine_.items.size();
}

std::uint64_t SimulatedLink::End::send(const std::string& record,
                                       long long now_ms) {
  return owner_.push(outgoing_, record, now_ms);
}

std::optional<Delivery> SimulatedLink::End::poll(long long now_ms) {
  auto incoming = outgoing_ == Direction::to_robot ? Direction::to_engine
                                                   : Direction::to_robot;
  return owner_.pop(incoming, now_ms);
}

void SimulatedLink::End::close() {
  std::lock_guard lock(owner_.mu_);
  owner_.closed_ = true;
}

bool SimulatedLink::End::closed() const {
  std::lock_guard lock(owner_.mu_);
  const Queue& in = outgoing_ == Direction::to_robot ? owner_.to_engine_
                                                     : owner_.to_robot_;
  return owner_.closed_ && in.items.empty();
}

void SimulatedLink::End::wait_for_traffic(std::chrono::milliseconds max_wait) {
  std::this_thread::sleep_for(std::min(max_wait, std::chrono::milliseconds(1)));
}

// ---------------------------------------------------------------------------

StreamSocketLink::StreamSocketLink(int fd) : fd_(fd) {}

StreamSocketLink::StreamSocketLink(StreamSocketLink&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)),
      buffer_(std::move(other.buffer_)),
      eof_(other.eof_),
      next_seq_(other.next_seq_) {}

StreamSocketLink::~StreamSocketLink() {
  if (fd_ >= 0) ::close(fd_);
}

std::string StreamSocketLink::socket_path(const std::string& dir,
                                          const std::string& btname) {
  return dir + "/" + btname + ".sock";
}

namespace {

sockaddr_un unix_address(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof addr.sun_path)
    throw EndpointDown("socket path too long: " + path);
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  return addr;
}

[[noreturn]] void fail(const std::string& what) {
  throw EndpointDown(what + ": " + std::strerror(errno));
}

}  // namespace

StreamSocketLink StreamSocketLink::accept_one(const std::string& path) {
  int server = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (server < 0) fail("socket");
  ::unlink(path.c_str());
  auto addr = unix_address(path);
  if (::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(server, 1) < 0) {
    ::close(server);
    fail("bind " + path);
  }
  int fd = ::accept(server, nullptr, nullptr);
  ::close(server);
  ::unlink(path.c_str());
  if (fd < 0) fail("accept " + path);
  return StreamSocketLink(fd);
}

StreamSocketLink StreamSocketLink::connect_to(const std::string& path) {
  int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) fail("socket");
  auto addr = unix_address(path);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    ::close(fd);
    fail("connect " + path);
  }
  return StreamSocketLink(fd);
}

std::pair<StreamSocketLink, StreamSocketLink> StreamSocketLink::pair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) < 0) fail("socketpair");
  return {StreamSocketLink(fds[0]), StreamSocketLink(fds[1])};
}

std::uint64_t StreamSocketLink::send(const std::string& record, long long) {
  if (fd_ < 0) throw EndpointDown("socket closed");
  std::string line = record + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t n = ::send(fd_, line.data() + off, line.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("send");
    }
    off += static_cast<std::size_t>(n);
  }
  return next_seq_++;
}

void StreamSocketLink::fill() {
  if (fd_ < 0 || eof_) return;
  char buf[4096];
  while (true) {
    ssize_t n = ::recv(fd_, buf, sizeof buf, MSG_DONTWAIT);
    if (n > 0) {
      buffer_.append(buf, static_cast<std::size_t>(n));
      continue;
    }
    if (n == 0) eof_ = true;
    else if (errno == EINTR) continue;
    else if (errno != EAGAIN && errno != EWOULDBLOCK) eof_ = true;
    return;
  }
}

std::optional<Delivery> StreamSocketLink::poll(long long) {
  fill();
  auto nl = buffer_.find('\n');
  if (nl == std::string::npos) return std::nullopt;
  Delivery d{next_seq_++, buffer_.substr(0, nl)};
  buffer_.erase(0, nl + 1);
  return d;
}

void StreamSocketLink::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

bool StreamSocketLink::closed() const {
  return (fd_ < 0 || eof_) && buffer_.find('\n') == std::string::npos;
}

void StreamSocketLink::wait_for_traffic(std::chrono::milliseconds max_wait) {
  if (fd_ < 0) return;
  pollfd p{fd_, POLLIN, 0};
  ::poll(&p, 1, static_cast<int>(max_wait.count()));
}

}  // namespace nxtbdi::bridge
