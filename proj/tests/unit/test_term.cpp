#include <doctest.h>

#include <random>

#include "nxtbdi/asl/parser.hpp"
#include "nxtbdi/term.hpp"

using namespace nxtbdi;

namespace {

Term t(const char* text) { return asl::parse_term(text); }

Term random_term(std::mt19937& rng, int depth, bool ground) {
  static const char* atoms[] = {"a", "b", "c", "light", "bar"};
  static const char* vars[] = {"X", "Y", "Z", "W"};
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 2);
  switch (pick(rng)) {
    case 0: return Term::atom(atoms[rng() % 5]);
    case 1: return Term::number(static_cast<double>(rng() % 7));
    case 2:
      if (!ground) return Term::var(vars[rng() % 4]);
      return Term::atom(atoms[rng() % 5]);
    case 3: {
      TermList items;
      for (unsigned i = 0, n = rng() % 3; i < n; ++i)
        items.push_back(random_term(rng, depth - 1, ground));
      return Term::list(items);
    }
    default: {
      TermList args;
      for (unsigned i = 0, n = 1 + rng() % 3; i < n; ++i)
        args.push_back(random_term(rng, depth - 1, ground));
      return Term::structure(atoms[rng() % 3], args);
    }
  }
}

}  // namespace

TEST_CASE("unify binds sensor variables") {
  auto s = unify(t("light(S1,V1)"), t("light(1,360)"));
  REQUIRE(s);
  CHECK(s->size() == 2);
  CHECK(s->apply(Term::var("S1")) == Term::number(1));
  CHECK(s->apply(Term::var("V1")) == Term::number(360));
}

TEST_CASE("unify fails on distinct atoms") {
  CHECK_FALSE(unify(t("a"), t("b")));
}

TEST_CASE("unify matches a told message") {
  auto s = unify(t("obstacle_after(N)"), t("obstacle_after(3)"));
  REQUIRE(s);
  CHECK(s->apply(Term::var("N")) == Term::number(3));
}

TEST_CASE("occurs check") {
  CHECK_FALSE(unify(t("X"), t("f(X)")));
  CHECK_FALSE(unify(t("g(X,X)"), t("g(Y,f(Y))")));
}

TEST_CASE("annotations do not take part in unification") {
  CHECK(unify(t("light(1,V)"), t("light(1,360)[source(percept)]")));
}

TEST_CASE("unify properties over random terms") {
  std::mt19937 rng(1234);
  for (int i = 0; i < 3000; ++i) {
    Term g = random_term(rng, 3, true);
    auto self = unify(g, g);
    REQUIRE(self);
    CHECK(self->empty());

    Term a = random_term(rng, 3, false);
    Term b = random_term(rng, 3, false);
    auto ab = unify(a, b);
    auto ba = unify(b, a);
    REQUIRE(ab.has_value() == ba.has_value());
    if (ab) {
      CHECK(equal_modulo_annotations(ab->apply(a), ab->apply(b)));
      CHECK(equal_modulo_annotations(ba->apply(a), ba->apply(b)));
      // Idempotent: applying twice changes nothing.
      CHECK(ab->apply(ab->apply(a)) == ab->apply(a));
    }
  }
}

TEST_CASE("eval_arith") {
  Substitution s;
  s.bind("N", Term::number(0));
  CHECK(eval_arith(t("N + 1"), s) == 1);
  CHECK(eval_arith(t("5"), {}) == 5);
  CHECK(eval_arith(t("2*3+4"), {}) == 10);
  CHECK(eval_arith(t("2+3*4"), {}) == 14);
  CHECK(eval_arith(t("-3 + 1"), {}) == -2);
  CHECK_THROWS_AS(eval_arith(t("M + 1"), {}), EvalError);
  CHECK_THROWS_AS(eval_arith(t("a + 1"), {}), EvalError);
  CHECK_THROWS_AS(eval_arith(t("1 / 0"), {}), EvalError);
}

TEST_CASE("eval_relation") {
  CHECK(eval_relation(RelOp::ge, t("360"), t("350"), {}));
  CHECK_FALSE(eval_relation(RelOp::neq, t("1"), t("1"), {}));
  CHECK(eval_relation(RelOp::neq, t("1"), t("2"), {}));
  CHECK_THROWS_AS(eval_relation(RelOp::lt, t("a"), t("1"), {}), EvalError);

  SUBCASE("= evaluates the right-hand side then binds") {
    Substitution s;
    s.bind("N", Term::number(2));
    auto r = eval_relation(RelOp::unify, t("BarsPassed"), t("N + 1"), s);
    REQUIRE(r);
    CHECK(r->size() == 2);
    CHECK(r->apply(Term::var("BarsPassed")) == Term::number(3));
    CHECK(r->apply(Term::var("N")) == Term::number(2));
  }
  SUBCASE("= fails on a different bound value") {
    Substitution s;
    s.bind("X", Term::number(4));
    CHECK_FALSE(eval_relation(RelOp::unify, t("X"), t("1 + 2"), s));
  }
}

TEST_CASE("canonical text") {
  CHECK(to_string(t("light(1,360)[source(percept)]")) ==
        "light(1,360)[source(percept)]");
  CHECK(to_string(t("forward([a,b],[60,60])")) == "forward([a,b],[60,60])");
  CHECK(format_number(360) == "360");
  CHECK(format_number(2.5) == "2.5");
  CHECK(to_string(Term::structure("f", {})) == "f");
}

TEST_CASE("rename_vars keeps anonymous variables") {
  Term r = rename_vars(t("light(X,_)"), "7");
  CHECK(r.args()[0].name() == "X#7");
  CHECK(r.args()[1].is_anonymous());
}
