#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "nxtbdi/asl/parser.hpp"
#include "nxtbdi/belief_base.hpp"

using namespace nxtbdi;

namespace {

Term t(const char* text) { return asl::parse_term(text); }

std::vector<UniquenessPattern> sensor_patterns() {
  std::vector<UniquenessPattern> out;
  for (const char* p : {"light(port,_)", "sound(port,_)", "obstacle(port,_)",
                        "touching(port,_)"})
    out.push_back(UniquenessPattern::from_term(t(p)));
  return out;
}

BeliefBase with_rules(const char* source) {
  BeliefBase bb(sensor_patterns());
  for (auto& r : asl::parse_agent_program(source).rules) bb.add_rule(r);
  return bb;
}

const char* kLineRules = R"(
distinct_sensors(Sensor1, Sensor2) :- Sensor1 \== Sensor2.
on_line(Value1, Value2) :- Value1 >= 350 & Value2 >= 350.
turning(Value1, Value2) :- Value1 < 350 & Value2 >= 350.
)";

}  // namespace

TEST_CASE("add reports changes") {
  BeliefBase bb(sensor_patterns());
  auto c1 = bb.add(t("light(1,360)"));
  REQUIRE(c1.size() == 1);
  CHECK(c1[0] == BeliefChange{BeliefChange::Kind::add, t("light(1,360)")});

  auto c2 = bb.add(t("light(1,355)"));
  REQUIRE(c2.size() == 2);
  CHECK(c2[0] == BeliefChange{BeliefChange::Kind::remove, t("light(1,360)")});
  CHECK(c2[1] == BeliefChange{BeliefChange::Kind::add, t("light(1,355)")});

  CHECK(bb.add(t("light(1,355)")).empty());
  CHECK(bb.size() == 1);
  CHECK_THROWS_AS(bb.add(t("light(1,V)")), std::invalid_argument);
}

TEST_CASE("ports are separate keys") {
  BeliefBase bb(sensor_patterns());
  bb.add(t("light(1,360)"));
  bb.add(t("light(2,300)"));
  bb.add(t("sound(1,40)"));
  CHECK(bb.size() == 3);
}

TEST_CASE("uniqueness fuzz") {
  std::mt19937 rng(99);
  BeliefBase bb(sensor_patterns());
  const char* functors[] = {"light", "sound", "obstacle", "touching"};
  for (int i = 0; i < 20000; ++i) {
    const char* f = functors[rng() % 4];
    int port = 1 + static_cast<int>(rng() % 4);
    Term value = std::string(f) == "touching"
                     ? Term::atom(rng() % 2 ? "true" : "false")
                     : Term::number(static_cast<double>(rng() % 1024));
    bb.add(Term::structure(f, {Term::number(port), value})
               .with_annotations({t("source(percept)")}));
    if (i % 97 == 0) {
      std::set<std::pair<std::string, double>> keys;
      for (const auto& b : bb.beliefs())
        REQUIRE(keys.insert({b.name(), b.args()[0].value()}).second);
    }
  }
  CHECK(bb.size() <= 16);
}

TEST_CASE("linefollower rule queries") {
  auto bb = with_rules(kLineRules);
  auto q = bb.query(asl::parse_formula("on_line(360,355)"));
  REQUIRE(q.size() == 1);
  CHECK(q[0].empty());
  CHECK(bb.query(asl::parse_formula("distinct_sensors(1,1)")).empty());

  bb.add(t("light(1,360)"));
  auto l = bb.query(asl::parse_formula("light(S,V)"));
  REQUIRE(l.size() == 1);
  CHECK(l[0].apply(t("S")) == t("1"));
  CHECK(l[0].apply(t("V")) == t("360"));
}

TEST_CASE("query agrees with a brute-force oracle") {
  std::mt19937 rng(7);
  const char* ctx =
      "light(S1,V1) & light(S2,V2) & distinct_sensors(S1,S2) & on_line(V1,V2)";
  const char* turn = "light(1,V1) & light(2,V2) & turning(V1,V2)";
  for (int round = 0; round < 300; ++round) {
    // No uniqueness here so the base can hold up to 20 facts.
    BeliefBase bb;
    for (auto& r : asl::parse_agent_program(kLineRules).rules) bb.add_rule(r);
    std::vector<std::pair<int, int>> facts;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 20); i < n; ++i) {
      int port = 1 + static_cast<int>(rng() % 3);
      int value = 300 + static_cast<int>(rng() % 100);
      if (std::find(facts.begin(), facts.end(), std::pair{port, value}) !=
          facts.end())
        continue;
      facts.push_back({port, value});
      bb.add(Term::structure("light", {Term::number(port), Term::number(value)}));
    }

    std::multiset<std::vector<double>> expected, got;
    for (auto [s1, v1] : facts)
      for (auto [s2, v2] : facts)
        if (s1 != s2 && v1 >= 350 && v2 >= 350)
          expected.insert({double(s1), double(v1), double(s2), double(v2)});
    for (const auto& s : bb.query(asl::parse_formula(ctx)))
      got.insert({s.apply(t("S1")).value(), s.apply(t("V1")).value(),
                  s.apply(t("S2")).value(), s.apply(t("V2")).value()});
    CHECK(got == expected);

    std::multiset<std::vector<double>> exp_turn, got_turn;
    for (auto [s1, v1] : facts)
      for (auto [s2, v2] : facts)
        if (s1 == 1 && s2 == 2 && v1 < 350 && v2 >= 350)
          exp_turn.insert({double(v1), double(v2)});
    for (const auto& s : bb.query(asl::parse_formula(turn)))
      got_turn.insert({s.apply(t("V1")).value(), s.apply(t("V2")).value()});
    CHECK(got_turn == exp_turn);
  }
}

TEST_CASE("negation as failure") {
  auto bb = with_rules("on_bar(Value) :- Value < 400.");
  CHECK(bb.query_first(asl::parse_formula("not on_bar(500)")));
  CHECK_FALSE(bb.query_first(asl::parse_formula("not on_bar(300)")));
  CHECK(bb.query_first(asl::parse_formula("not light(_,_)")));
  bb.add(t("light(1,300)"));
  CHECK_FALSE(bb.query_first(asl::parse_formula("not light(_,_)")));
}

TEST_CASE("cyclic rules hit the depth limit") {
  BeliefBase bb({}, 32);
  for (auto& r : asl::parse_agent_program("p(X) :- p(X).").rules) bb.add_rule(r);
  CHECK_THROWS_AS(bb.query(asl::parse_formula("p(1)")), EvalError);
}

TEST_CASE("abolish") {
  BeliefBase bb(sensor_patterns());
  bb.add(t("light(1,360)"));
  bb.add(t("light(2,340)"));
  bb.add(t("goal(search)"));
  CHECK(bb.abolish(t("light(_,_)")) == 2);
  CHECK(bb.contains(t("goal(search)")));
  CHECK(bb.size() == 1);

  BeliefBase empty;
  CHECK(empty.abolish(t("light(_,_)")) == 0);
  BeliefBase x;
  x.add(t("x"));
  CHECK(x.abolish(t("x")) == 1);
}

TEST_CASE("add then abolish restores a percept-free base") {
  std::mt19937 rng(3);
  BeliefBase bb(sensor_patterns());
  bb.add(t("goal(search)"));
  bb.add(t("bars_passed(0)"));
  auto before = bb.beliefs();
  for (int i = 0; i < 200; ++i)
    bb.add(Term::structure("light", {Term::number(1 + rng() % 4),
                                     Term::number(rng() % 1024)}));
  bb.abolish(t("light(_,_)"));
  CHECK(bb.beliefs() == before);
}

TEST_CASE("remove respects pattern annotations") {
  BeliefBase bb;
  bb.add(t("obstacle_after(2)[source(obstaclefinder)]"));
  CHECK_FALSE(bb.remove(t("obstacle_after(_)[source(percept)]")));
  auto r = bb.remove(t("obstacle_after(N)"));
  REQUIRE(r);
  CHECK(bb.size() == 0);
}
