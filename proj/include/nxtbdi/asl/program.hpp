#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nxtbdi/term.hpp"

namespace nxtbdi::asl {

enum class Polarity { add, remove };
enum class GoalKind { belief, achieve };

/// `+b`, `-b`, `+!g` or `-!g`.
struct TriggerEvent {
  Polarity polarity = Polarity::add;
  GoalKind kind = GoalKind::belief;
  Term term;

  friend bool operator==(const TriggerEvent&, const TriggerEvent&) = default;
};

std::string to_string(const TriggerEvent& t);

/// Context formula tree: literal, relational comparison, `not`, `&`, `true`.
class Formula {
 public:
  enum class Kind { truth, literal, relation, negation, conjunction };

  Formula() = default;
  static Formula truth() { return Formula{}; }
  static Formula literal(Term t);
  static Formula relation(RelOp op, Term lhs, Term rhs);
  static Formula negation(Formula inner);
  static Formula conjunction(std::vector<Formula> parts);

  Kind kind() const { return kind_; }
  /// Literal term, or the left-hand side of a relation.
  const Term& term() const { return term_; }
  const Term& rhs() const { return rhs_; }
  RelOp op() const { return op_; }
  const std::vector<Formula>& children() const { return children_; }

  friend bool operator==(const Formula&, const Formula&) = default;

 private:
  Kind kind_ = Kind::truth;
  Term term_;
  Term rhs_;
  RelOp op_ = RelOp::unify;
  std::vector<Formula> children_;
};

std::string to_string(const Formula& f);

enum class StepKind {
  action,
  internal_action,
  achieve,        // !g
  achieve_async,  // !!g
  test,           // ?b
  add_belief,     // +b
  remove_belief,  // -b
  replace_belief, // -+b
  relation        // X = N + 1, X < 3, ...
};

struct BodyStep {
  StepKind kind = StepKind::action;
  /// The goal/belief/action term; for internal actions a term whose functor
  /// starts with '.'; for relations the left-hand side.
  Term term;
  RelOp op = RelOp::unify;
  Term rhs;

  friend bool operator==(const BodyStep&, const BodyStep&) = default;
};

std::string to_string(const BodyStep& s);

struct Plan {
  TriggerEvent trigger;
  std::optional<Formula> context;
  std::vector<BodyStep> body;

  friend bool operator==(const Plan&, const Plan&) = default;
};

std::string to_string(const Plan& p);

/// Renames every variable `V` to `V#suffix` (see nxtbdi::rename_vars).
Formula rename_vars(const Formula& f, std::string_view suffix);
Plan rename_vars(const Plan& p, std::string_view suffix);

struct Rule {
  Term head;
  Formula body;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct AgentProgram {
  std::vector<Term> beliefs;
  std::vector<Rule> rules;
  std::vector<Term> goals;
  std::vector<Plan> plans;

  friend bool operator==(const AgentProgram&, const AgentProgram&) = default;
};

}  // namespace nxtbdi::asl
