#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nxtbdi {

class Term;
using TermList = std::vector<Term>;

/// Raised when arithmetic or an ordering comparison cannot be evaluated
/// (unbound variable, non-numeric operand, division by zero).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A logical term: atom, number, quoted string, variable, list or structure,
/// optionally carrying annotations such as `source(percept)`.
///
/// Terms are plain values. A structure built with no arguments collapses to
/// an atom, so every structure has arity >= 1.
class Term {
 public:
  enum class Kind { atom, number, string, variable, list, structure };

  Term() = default;

  static Term atom(std::string name);
  static Term number(double value);
  static Term string(std::string text);
  static Term var(std::string name);
  static Term list(TermList items);
  static Term structure(std::string functor, TermList args);

  Kind kind() const { return kind_; }
  bool is_atom() const { return kind_ == Kind::atom; }
  bool is_number() const { return kind_ == Kind::number; }
  bool is_string() const { return kind_ == Kind::string; }
  bool is_var() const { return kind_ == Kind::variable; }
  bool is_list() const { return kind_ == Kind::list; }
  bool is_structure() const { return kind_ == Kind::structure; }
  /// Atom or structure: something that can be a belief, goal or action.
  bool is_literal() const { return is_atom() || is_structure(); }
  bool is_anonymous() const { return is_var() && name_ == "_"; }

  /// Atom name, structure functor, variable name or string text.
  const std::string& name() const { return name_; }
  double value() const { return value_; }
  /// Structure arguments or list items; empty otherwise.
  const TermList& args() const { return args_; }
  std::size_t arity() const { return is_structure() ? args_.size() : 0; }

  const TermList& annotations() const { return annots_; }
  Term with_annotations(TermList annots) const;
  Term without_annotations() const;
  /// Appends `annot` unless an identical annotation is already present.
  Term& annotate(const Term& annot);

  /// True when no named variable occurs (anonymous `_` counts as a variable).
  bool is_ground() const;

  /// Exact structural equality, annotations included (order-sensitive).
  friend bool operator==(const Term& a, const Term& b);

 private:
  Kind kind_ = Kind::atom;
  std::string name_;
  double value_ = 0.0;
  TermList args_;
  TermList annots_;
};

/// Equality that ignores annotations at every depth.
bool equal_modulo_annotations(const Term& a, const Term& b);

/// Equality that treats annotation lists as sets.
bool equal_annotation_sets(const Term& a, const Term& b);

/// Canonical surface syntax: `light(1,360)[source(percept)]`, `[a,b]`,
/// `N + 1`. Integer-valued numbers print without a decimal point.
std::string to_string(const Term& t);
std::string format_number(double v);
std::ostream& operator<<(std::ostream& os, const Term& t);

/// Names of all named (non-anonymous) variables, in first-occurrence order.
std::vector<std::string> variables_of(const Term& t);

/// Bindings from variable names to terms. Bindings may chain (X -> Y -> 3);
/// `apply` resolves chains fully.
class Substitution {
 public:
  Substitution() = default;

  bool bound(const std::string& var) const { return map_.count(var) != 0; }
  const Term* lookup(const std::string& var) const;
  void bind(const std::string& var, Term value);
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }
  const std::map<std::string, Term>& bindings() const { return map_; }

  /// Follows variable bindings at the top level only.
  const Term& walk(const Term& t) const;
  /// Replaces every bound variable (recursively, annotations included).
  Term apply(const Term& t) const;

  friend bool operator==(const Substitution& a, const Substitution& b) {
    return a.map_ == b.map_;
  }

 private:
  std::map<std::string, Term> map_;
};

std::string to_string(const Substitution& s);

/// Unifies `a` and `b` under `s` with occurs-check. Annotations do not take
/// part. Returns the extended substitution, or nothing on mismatch.
std::optional<Substitution> unify(const Term& a, const Term& b,
                                  Substitution s = {});

/// Every annotation of `pattern` must unify with some annotation of `target`.
std::optional<Substitution> unify_annotations(const Term& pattern,
                                              const Term& target,
                                              Substitution s);

/// `+ - * /` over numbers and bound variables; unary minus included.
bool is_arith_expr(const Term& t);
double eval_arith(const Term& e, const Substitution& s);

enum class RelOp { lt, le, gt, ge, eq, neq, unify };
std::string_view to_string(RelOp op);
std::optional<RelOp> parse_rel_op(std::string_view text);

/// Ordering operators compare numbers (EvalError otherwise); `==`/`\==`
/// compare structurally; `=` unifies after evaluating a compound
/// arithmetic right-hand side.
std::optional<Substitution> eval_relation(RelOp op, const Term& l,
                                          const Term& r, Substitution s);

/// Renames every named variable `V` to `V#suffix`.
Term rename_vars(const Term& t, std::string_view suffix);

}  // namespace nxtbdi
