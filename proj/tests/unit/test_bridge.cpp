#include <doctest.h>

#include <random>
#include <set>

#include "nxtbdi/asl/parser.hpp"
#include "nxtbdi/bridge/endpoint.hpp"

using namespace nxtbdi;
using namespace nxtbdi::bridge;

namespace {

Term t(const char* text) { return asl::parse_term(text); }

std::string encoded(const char* action, std::uint64_t id = 1) {
  return to_wire(encode_action(t(action), id));
}

// Counts every record passing through, in either direction.
class CountingLink : public Link {
 public:
  explicit CountingLink(Link& inner) : inner_(inner) {}
  std::uint64_t send(const std::string& r, long long now) override {
    ++sent;
    return inner_.send(r, now);
  }
  std::optional<Delivery> poll(long long now) override {
    auto d = inner_.poll(now);
    if (d) ++received;
    return d;
  }
  void close() override { inner_.close(); }
  bool closed() const override { return inner_.closed(); }

  std::uint64_t sent = 0, received = 0;

 private:
  Link& inner_;
};

}  // namespace

TEST_CASE("encode actions") {
  CHECK(encoded("forward([a,b],[300,300])") == "A|1|FWD|a,b|300,300");
  CHECK(encoded("rotate([a,b],[100,-100])", 7) == "A|7|ROT|a,b|100,-100");
  CHECK(encoded("stop([a,b])") == "A|1|STP|a,b|");
  CHECK(encoded("block(true)") == "A|1|BLK||1");
  CHECK(encoded("exit") == "X");
  auto cmd = std::get<ActionCommand>(encode_action(t("speed([c],[12.9])"), 2));
  CHECK(cmd.args == std::vector<long long>{12});
  CHECK(cmd.motors == std::vector<Motor>{Motor::c});
  CHECK_THROWS_AS(encode_action(t("fly([a])"), 1), UnknownAction);
  CHECK_THROWS_AS(encode_action(t("forward([a],[60,60])"), 1), MalformedAction);
}

TEST_CASE("decode percepts") {
  auto d = [](const char* rec) {
    return to_string(decode_percept(std::get<PerceptSample>(from_wire(rec))));
  };
  CHECK(d("P|LIGHT|1|360") == "light(1,360)[source(percept)]");
  CHECK(d("P|OBSTACLE|1|40") == "obstacle(1,40)[source(percept)]");
  CHECK(d("P|TOUCHING|1|true") == "touching(1,true)[source(percept)]");
  CHECK(d("P|SOUND|2|55") == "sound(2,55)[source(percept)]");
  CHECK_THROWS_AS(decode_percept({PerceptKind::light, 5, 10}), MalformedPercept);
  CHECK_THROWS_AS(decode_percept({PerceptKind::light, 1, 5000}),
                  MalformedPercept);
  CHECK_THROWS_AS(from_wire("Q|1"), WireFormatError);
  CHECK_THROWS_AS(from_wire("A|x|FWD|a|1"), WireFormatError);
}

TEST_CASE("codec round trip") {
  std::mt19937 rng(5);
  const PerceptKind kinds[] = {PerceptKind::light, PerceptKind::obstacle,
                               PerceptKind::touching, PerceptKind::sound};
  for (int i = 0; i < 20000; ++i) {
    PerceptKind k = kinds[rng() % 4];
    long long hi = k == PerceptKind::light       ? 1023
                   : k == PerceptKind::obstacle ? 255
                   : k == PerceptKind::touching ? 1
                                                 : 100;
    PerceptSample p{k, 1 + static_cast<int>(rng() % 4),
                    static_cast<long long>(rng() % (hi + 1))};
    Term term = decode_percept(p);
    CHECK(percept_from_term(term) == p);
    CHECK(from_wire(to_wire(p)) == WireMessage{p});
  }

  // Distinct action terms never share an encoding.
  const char* verbs[] = {"forward", "backward", "rotate", "speed"};
  const char* motor_sets[] = {"[a]", "[b]", "[a,b]", "[b,a]", "[a,b,c]"};
  std::set<std::string> terms, wires;
  for (int i = 0; i < 5000; ++i) {
    std::string ms = motor_sets[rng() % 5];
    std::size_t n = std::count(ms.begin(), ms.end(), ',') + 1;
    std::string args = "[";
    for (std::size_t j = 0; j < n; ++j)
      args += (j ? "," : "") + std::to_string(int(rng() % 600) - 300);
    args += "]";
    std::string text = std::string(verbs[rng() % 4]) + "(" + ms + "," + args + ")";
    std::string w = to_wire(encode_action(asl::parse_term(text), 1));
    CHECK(from_wire(w) == encode_action(asl::parse_term(text), 1));
    if (terms.insert(text).second) CHECK(wires.insert(w).second);
  }
}

TEST_CASE("simulated link keeps FIFO order within latency bounds") {
  SimulatedLink link({30, 20}, 11);
  for (int i = 0; i < 500; ++i)
    link.robot_end().send("P|LIGHT|1|" + std::to_string(i), i);
  std::vector<int> order;
  for (long long now = 0; now < 1000; ++now)
    while (auto d = link.engine_end().poll(now))
      order.push_back(std::stoi(d->record.substr(d->record.rfind('|') + 1)));
  REQUIRE(order.size() == 500);
  CHECK(std::is_sorted(order.begin(), order.end()));
  for (const auto& r : link.log()) {
    CHECK(r.due_ms - r.sent_ms >= 10);
    // FIFO may push a record past its own jitter, never past the bound of
    // the latest earlier record.
    CHECK(r.due_ms - r.sent_ms <= 50 + 50);
  }
}

TEST_CASE("sequence numbers are shared by both directions") {
  SimulatedLink link({0, 0}, 1);
  CHECK(link.engine_end().send("X", 0) == 1);
  CHECK(link.robot_end().send("K|1", 0) == 2);
  CHECK(link.engine_end().send("X", 0) == 3);
}

TEST_CASE("latency model parsing") {
  auto m = LatencyModel::parse("60+-40");
  CHECK(m.fixed_ms == 60);
  CHECK(m.jitter_ms == 40);
  CHECK(LatencyModel::parse("30").jitter_ms == 0);
  CHECK_THROWS(LatencyModel::parse("fast"));
}

TEST_CASE("stream socket link carries records") {
  auto [a, b] = StreamSocketLink::pair();
  a.send("A|1|FWD|a,b|60,60", 0);
  a.send("X", 0);
  std::vector<std::string> got;
  for (int i = 0; i < 100 && got.size() < 2; ++i) {
    b.wait_for_traffic(std::chrono::milliseconds(10));
    while (auto d = b.poll(0)) got.push_back(d->record);
  }
  CHECK(got == std::vector<std::string>{"A|1|FWD|a,b|60,60", "X"});
  a.close();
  for (int i = 0; i < 100 && !b.closed(); ++i) {
    b.wait_for_traffic(std::chrono::milliseconds(10));
    b.poll(0);
  }
  CHECK(b.closed());
}

TEST_CASE("endpoint drains percepts in order") {
  long long now = 0;
  SimulatedLink link({0, 0}, 1);
  BridgeEndpoint ep(Mode::async, link.engine_end(), [&] { return now; });
  CHECK(ep.perceive().empty());
  CHECK(ep.ready());
  link.robot_end().send("P|LIGHT|1|360", now);
  link.robot_end().send("P|LIGHT|2|355", now);
  auto got = ep.perceive();
  REQUIRE(got.size() == 2);
  CHECK(to_string(got[0].term) == "light(1,360)[source(percept)]");
  CHECK(to_string(got[1].term) == "light(2,355)[source(percept)]");
}

TEST_CASE("async act never waits") {
  long long now = 0;
  SimulatedLink link({0, 0}, 1);
  BridgeEndpoint ep(Mode::async, link.engine_end(), [&] { return now; });
  auto id = ep.act(t("stop([a,b])"));
  CHECK(ep.counters().actions == 1);
  CHECK(ep.ack_state(id) == AckState::pending);
  CHECK(ep.ready());
  link.robot_end().send("K|" + std::to_string(id), now);
  ep.pump();
  CHECK(ep.outstanding_acks() == 0);
  CHECK(ep.counters().acks == 1);
  CHECK_THROWS_AS(ep.act(t("forward([a],[60,60])")), MalformedAction);

  ep.act(t("exit"));
  CHECK(ep.exited());
  CHECK_THROWS_AS(ep.act(t("stop([a])")), EndpointDown);
}

TEST_CASE("sync readiness and ACK timeout") {
  long long now = 0;
  SimulatedLink link({0, 0}, 1);
  BridgeEndpoint ep(Mode::sync, link.engine_end(), [&] { return now; }, 1000);
  CHECK_FALSE(ep.ready());
  link.robot_end().send("P|LIGHT|1|360", now);
  CHECK(ep.ready());

  auto id = ep.act(t("stop([a,b])"));
  CHECK_FALSE(ep.ready());
  CHECK(ep.pending_ids() == std::vector<std::uint64_t>{id});
  now = 999;
  CHECK(ep.ack_state(id) == AckState::pending);
  now = 1001;
  CHECK(ep.ack_state(id) == AckState::timed_out);

  auto id2 = ep.act(t("stop([a])"));
  link.robot_end().send("K|" + std::to_string(id2), now);
  ep.pump();
  CHECK(ep.ack_state(id2) == AckState::ok);
  auto id3 = ep.act(t("stop([c])"));
  link.robot_end().send("K|" + std::to_string(id3) + "|FAIL", now);
  ep.pump();
  CHECK(ep.ack_state(id3) == AckState::failed);
}

TEST_CASE("transport counters match the link double") {
  long long now = 0;
  SimulatedLink link({5, 3}, 9);
  CountingLink counting(link.engine_end());
  BridgeEndpoint ep(Mode::async, counting, [&] { return now; });
  std::mt19937 rng(1);
  for (now = 0; now < 2000; ++now) {
    if (rng() % 3 == 0) ep.act(t("forward([a,b],[60,60])"));
    if (rng() % 2 == 0)
      link.robot_end().send("P|LIGHT|1|" + std::to_string(rng() % 1024), now);
    while (auto d = link.robot_end().poll(now))
      link.robot_end().send("K|" + d->record.substr(2, d->record.find('|', 2) - 2),
                            now);
    ep.perceive();
  }
  CHECK(ep.counters().sent == counting.sent);
  CHECK(ep.counters().received == counting.received);
}

TEST_CASE("malformed records are counted and skipped") {
  long long now = 0;
  SimulatedLink link({0, 0}, 1);
  BridgeEndpoint ep(Mode::async, link.engine_end(), [&] { return now; });
  link.robot_end().send("P|LIGHT|9|360", now);
  link.robot_end().send("garbage", now);
  link.robot_end().send("P|LIGHT|1|360", now);
  CHECK(ep.perceive().size() == 1);
  CHECK(ep.counters().malformed == 2);
}
