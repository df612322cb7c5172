#include "nxtbdi/belief_base.hpp"

#include <algorithm>
#include <stdexcept>

namespace nxtbdi {

using asl::Formula;

UniquenessPattern UniquenessPattern::from_term(const Term& pattern) {
  if (!pattern.is_structure())
    throw std::invalid_argument("uniqueness pattern must be a structure: " +
                                to_string(pattern));
  UniquenessPattern p;
  p.functor = pattern.name();
  p.arity = pattern.arity();
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!pattern.args()[i].is_anonymous()) p.key_positions.push_back(i);
  if (p.key_positions.empty())
    throw std::invalid_argument("uniqueness pattern has no key argument: " +
                                to_string(pattern));
  return p;
}

bool UniquenessPattern::covers(const Term& belief) const {
  return belief.is_structure() && belief.name() == functor &&
         belief.arity() == arity;
}

bool UniquenessPattern::same_key(const Term& a, const Term& b) const {
  if (!covers(a) || !covers(b)) return false;
  return std::all_of(key_positions.begin(), key_positions.end(),
                     [&](std::size_t i) {
                       return equal_modulo_annotations(a.args()[i], b.args()[i]);
                     });
}

std::string UniquenessPattern::key_of(const Term& belief) const {
  std::string out = functor + "(";
  for (std::size_t k = 0; k < key_positions.size(); ++k) {
    if (k) out += ",";
    out += to_string(belief.args()[key_positions[k]].without_annotations());
  }
  return out + ")";
}

BeliefBase::BeliefBase(std::vector<UniquenessPattern> patterns,
                       std::size_t max_depth)
    : patterns_(std::move(patterns)), max_depth_(max_depth) {}

bool BeliefBase::contains(const Term& belief) const {
  return std::any_of(beliefs_.begin(), beliefs_.end(), [&](const Term& b) {
    return equal_annotation_sets(b, belief);
  });
}

std::vector<BeliefChange> BeliefBase::add(const Term& belief) {
  if (!belief.is_ground())
    throw std::invalid_argument("belief must be ground: " + to_string(belief));
  if (!belief.is_literal())
    throw std::invalid_argument("belief must be an atom or structure: " +
                                to_string(belief));
  if (contains(belief)) return {};

  std::vector<BeliefChange> changes;
  // same literal, new annotations: merge them
  for (auto& b : beliefs_) {
    if (equal_modulo_annotations(b, belief)) {
      for (const auto& a : belief.annotations()) b.annotate(a);
      changes.push_back({BeliefChange::Kind::add, b});
      return changes;
    }
  }
  for (const auto& p : patterns_) {
    if (!p.covers(belief)) continue;
    auto it = std::find_if(beliefs_.begin(), beliefs_.end(),
                           [&](const Term& b) { return p.same_key(b, belief); });
    if (it != beliefs_.end()) {
      changes.push_back({BeliefChange::Kind::remove, *it});
      beliefs_.erase(it);
    }
  }
  beliefs_.push_back(belief);
  changes.push_back({BeliefChange::Kind::add, belief});
  return changes;
}

std::optional<Term> BeliefBase::remove(const Term& pattern) {
  for (auto it = beliefs_.begin(); it != beliefs_.end(); ++it) {
    auto s = unify(pattern, *it);
    if (s && unify_annotations(pattern, *it, *s)) {
      Term removed = *it;
      beliefs_.erase(it);
      return removed;
    }
  }
  return std::nullopt;
}

std::size_t BeliefBase::abolish(const Term& pattern) {
  auto before = beliefs_.size();
  std::erase_if(beliefs_, [&](const Term& b) {
    return unify(pattern, b).has_value();
  });
  return before - beliefs_.size();
}

void BeliefBase::solve(const Formula& goal, const Substitution& s,
                       const Yield& yield) const {
  solve_formula(goal, s, 0, yield);
}

namespace {

void formula_vars(const Formula& f, std::vector<std::string>& out) {
  auto add = [&](const Term& t) {
    for (auto& v : variables_of(t))
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  switch (f.kind()) {
    case Formula::Kind::literal:
      add(f.term());
      break;
    case Formula::Kind::relation:
      add(f.term());
      add(f.rhs());
      break;
    case Formula::Kind::negation:
    case Formula::Kind::conjunction:
      for (const auto& c : f.children()) formula_vars(c, out);
      break;
    case Formula::Kind::truth:
      break;
  }
}

Substitution project(const Substitution& answer, const Substitution& input,
                     const std::vector<std::string>& vars) {
  Substitution out;
  auto keep = [&](const std::string& v) {
    if (answer.bound(v)) out.bind(v, answer.apply(Term::var(v)));
  };
  for (const auto& [v, _] : input.bindings()) keep(v);
  for (const auto& v : vars) keep(v);
  return out;
}

bool has_named_vars(const Formula& f, const Substitution& s) {
  std::vector<std::string> vars;
  formula_vars(f, vars);
  return std::any_of(vars.begin(), vars.end(), [&](const std::string& v) {
    return !s.apply(Term::var(v)).is_ground();
  });
}

}  // namespace

std::vector<Substitution> BeliefBase::query(const Formula& goal,
                                            const Substitution& s) const {
  std::vector<std::string> vars;
  formula_vars(goal, vars);
  std::vector<Substitution> out;
  solve(goal, s, [&](const Substitution& answer) {
    out.push_back(project(answer, s, vars));
    return true;
  });
  return out;
}

std::optional<Substitution> BeliefBase::query_first(
    const Formula& goal, const Substitution& s) const {
  std::vector<std::string> vars;
  formula_vars(goal, vars);
  std::optional<Substitution> out;
  solve(goal, s, [&](const Substitution& answer) {
    out = project(answer, s, vars);
    return false;
  });
  return out;
}

bool BeliefBase::solve_formula(const Formula& f, const Substitution& s,
                               std::size_t depth, const Yield& yield) const {
  if (depth > max_depth_)
    throw EvalError("resolution depth limit of " + std::to_string(max_depth_) +
                    " exceeded");
  switch (f.kind()) {
    case Formula::Kind::truth:
      return yield(s);
    case Formula::Kind::literal:
      return solve_literal(f.term(), s, depth, yield);
    case Formula::Kind::relation: {
      auto r = eval_relation(f.op(), f.term(), f.rhs(), s);
      return r ? yield(*r) : true;
    }
    case Formula::Kind::negation: {
      const Formula& inner = f.children().front();
      if (has_named_vars(inner, s))
        throw EvalError("negation over non-ground formula: not " +
                        asl::to_string(inner));
      bool found = false;
      solve_formula(inner, s, depth + 1, [&](const Substitution&) {
        found = true;
        return false;
      });
      return found ? true : yield(s);
    }
    case Formula::Kind::conjunction:
      return solve_conj(f.children(), 0, s, depth, yield);
  }
  return true;
}

bool BeliefBase::solve_conj(const std::vector<Formula>& parts, std::size_t i,
                            const Substitution& s, std::size_t depth,
                            const Yield& yield) const {
  if (i == parts.size()) return yield(s);
  return solve_formula(parts[i], s, depth, [&](const Substitution& next) {
    return solve_conj(parts, i + 1, next, depth, yield);
  });
}

bool BeliefBase::solve_literal(const Term& lit, const Substitution& s,
                               std::size_t depth, const Yield& yield) const {
  if (lit.is_atom() && lit.name() == "true") return yield(s);
  for (const auto& b : beliefs_) {
    auto u = unify(lit, b, s);
    if (!u) continue;
    auto ua = unify_annotations(lit, b, *u);
    if (!ua) continue;
    if (!yield(*ua)) return false;
  }
  for (const auto& rule : rules_) {
    const Term& head = rule.head;
    if (head.name() != lit.name() || head.arity() != lit.arity() ||
        head.kind() != lit.kind())
      continue;
    std::string suffix = "r" + std::to_string(++rename_counter_);
    Term renamed_head = rename_vars(head, suffix);
    auto u = unify(lit.without_annotations(), renamed_head, s);
    if (!u) continue;
    if (!solve_formula(asl::rename_vars(rule.body, suffix), *u, depth + 1, yield)) return false;
  }
  return true;
}

}  // namespace nxtbdi
