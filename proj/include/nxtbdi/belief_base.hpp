#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nxtbdi/asl/program.hpp"
#include "nxtbdi/term.hpp"

namespace nxtbdi {

/// A per-sensor uniqueness pattern such as `light(port,_)`: at most one
/// stored belief may match it for each combination of key arguments (the
/// positions that are not `_`).
struct UniquenessPattern {
  std::string functor;
  std::size_t arity = 0;
  std::vector<std::size_t> key_positions;

  static UniquenessPattern from_term(const Term& pattern);

  bool covers(const Term& belief) const;
  bool same_key(const Term& a, const Term& b) const;
  /// "light(1)" style rendering of the key of `belief`.
  std::string key_of(const Term& belief) const;
};

struct BeliefChange {
  enum class Kind { add, remove };
  Kind kind;
  Term belief;

  friend bool operator==(const BeliefChange&, const BeliefChange&) = default;
};

/// Beliefs with annotations plus Horn-style rules. Queries resolve
/// depth-first over beliefs then rules in declaration order; `not` is
/// negation as failure over ground sub-queries.
class BeliefBase {
 public:
  using Yield = std::function<bool(const Substitution&)>;

  explicit BeliefBase(std::vector<UniquenessPattern> patterns = {},
                      std::size_t max_depth = 256);

  /// Inserts a ground belief. A belief sharing a uniqueness key is replaced,
  /// reported as remove(old) then add(new). Re-adding an identical belief is
  /// a no-op. Throws std::invalid_argument for non-ground input.
  std::vector<BeliefChange> add(const Term& belief);

  /// Removes the first belief matching `pattern` (annotations of the pattern
  /// must be present on the belief). Returns the removed belief.
  std::optional<Term> remove(const Term& pattern);

  /// Removes every belief unifying with `pattern`; returns how many.
  std::size_t abolish(const Term& pattern);

  void clear() { beliefs_.clear(); }

  void add_rule(asl::Rule rule) { rules_.push_back(std::move(rule)); }
  const std::vector<asl::Rule>& rules() const { return rules_; }
  const std::vector<Term>& beliefs() const { return beliefs_; }
  const std::vector<UniquenessPattern>& patterns() const { return patterns_; }
  std::size_t size() const { return beliefs_.size(); }
  bool contains(const Term& belief) const;

  /// Enumerates answers; `yield` returns false to stop early. Throws
  /// EvalError on arithmetic failure, non-ground negation, or when the
  /// resolution depth limit is exceeded.
  void solve(const asl::Formula& goal, const Substitution& s,
             const Yield& yield) const;

  std::vector<Substitution> query(const asl::Formula& goal,
                                  const Substitution& s = {}) const;
  std::optional<Substitution> query_first(const asl::Formula& goal,
                                          const Substitution& s = {}) const;

 private:
  bool solve_formula(const asl::Formula& f, const Substitution& s,
                     std::size_t depth, const Yield& yield) const;
  bool solve_conj(const std::vector<asl::Formula>& parts, std::size_t i,
                  const Substitution& s, std::size_t depth,
                  const Yield& yield) const;
  bool solve_literal(const Term& lit, const Substitution& s, std::size_t depth,
                     const Yield& yield) const;

  std::vector<Term> beliefs_;
  std::vector<asl::Rule> rules_;
  std::vector<UniquenessPattern> patterns_;
  std::size_t max_depth_;
  mutable std::size_t rename_counter_ = 0;
};

}  // namespace nxtbdi
