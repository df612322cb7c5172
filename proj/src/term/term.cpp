#include "nxtbdi/term.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace nxtbdi {

Term Term::atom(std::string name) {
  Term t;
  t.kind_ = Kind::atom;
  t.name_ = std::move(name);
  return t;
}

Term Term::number(double value) {
  Term t;
  t.kind_ = Kind::number;
  t.value_ = value;
  return t;
}

Term Term::string(std::string text) {
  Term t;
  t.kind_ = Kind::string;
  t.name_ = std::move(text);
  return t;
}

Term Term::var(std::string name) {
  Term t;
  t.kind_ = Kind::variable;
  t.name_ = std::move(name);
  return t;
}

Term Term::list(TermList items) {
  Term t;
  t.kind_ = Kind::list;
  t.args_ = std::move(items);
  return t;
}

Term Term::structure(std::string functor, TermList args) {
  if (args.empty()) return atom(std::move(functor));
  Term t;
  t.kind_ = Kind::structure;
  t.name_ = std::move(functor);
  t.args_ = std::move(args);
  return t;
}

Term Term::with_annotations(TermList annots) const {
  Term t = *this;
  t.annots_ = std::move(annots);
  return t;
}

Term Term::without_annotations() const {
  Term t = *this;
  t.annots_.clear();
  return t;
}

Term& Term::annotate(const Term& annot) {
  if (std::find(annots_.begin(), annots_.end(), annot) == annots_.end())
    annots_.push_back(annot);
  return *this;
}

bool Term::is_ground() const {
  if (is_var()) return false;
  return std::all_of(args_.begin(), args_.end(),
                     [](const Term& a) { return a.is_ground(); }) &&
         std::all_of(annots_.begin(), annots_.end(),
                     [](const Term& a) { return a.is_ground(); });
}

bool operator==(const Term& a, const Term& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Term::Kind::number:
      if (a.value_ != b.value_) return false;
      break;
    case Term::Kind::list:
      break;
    default:
      if (a.name_ != b.name_) return false;
  }
  return a.args_ == b.args_ && a.annots_ == b.annots_;
}

bool equal_modulo_annotations(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return false;
  if (a.is_number()) return a.value() == b.value();
  if (!a.is_list() && a.name() != b.name()) return false;
  if (a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!equal_modulo_annotations(a.args()[i], b.args()[i])) return false;
  return true;
}

bool equal_annotation_sets(const Term& a, const Term& b) {
  if (!equal_modulo_annotations(a, b)) return false;
  const auto& x = a.annotations();
  const auto& y = b.annotations();
  auto subset = [](const TermList& p, const TermList& q) {
    return std::all_of(p.begin(), p.end(), [&](const Term& t) {
      return std::find(q.begin(), q.end(), t) != q.end();
    });
  };
  return subset(x, y) && subset(y, x);
}

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    auto i = static_cast<long long>(v);
    return std::to_string(i);
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

int precedence(const Term& t) {
  if (!t.is_structure()) return 3;
  if (t.arity() == 2 && (t.name() == "+" || t.name() == "-")) return 1;
  if (t.arity() == 2 && (t.name() == "*" || t.name() == "/")) return 2;
  return 3;
}

void print(std::ostream& os, const Term& t);

void print_seq(std::ostream& os, const TermList& items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << ',';
    print(os, items[i]);
  }
}

void print_operand(std::ostream& os, const Term& child, int min_prec) {
  if (precedence(child) < min_prec) {
    os << '(';
    print(os, child);
    os << ')';
  } else {
    print(os, child);
  }
}

void print(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::atom:
    case Term::Kind::variable:
      os << t.name();
      break;
    case Term::Kind::number:
      os << format_number(t.value());
      break;
    case Term::Kind::string:
      os << '"';
      for (char c : t.name()) {
        if (c == '"' || c == '\\') os << '\\';
        os << c;
      }
      os << '"';
      break;
    case Term::Kind::list:
      os << '[';
      print_seq(os, t.args());
      os << ']';
      break;
    case Term::Kind::structure: {
      int p = precedence(t);
      if (p < 3) {
        print_operand(os, t.args()[0], p);
        os << ' ' << t.name() << ' ';
        // left-associative: an equal-precedence right operand needs parens
        print_operand(os, t.args()[1], p + 1);
      } else if (t.name() == "-" && t.arity() == 1) {
        os << '-';
        print_operand(os, t.args()[0], 3);
      } else {
        os << t.name() << '(';
        print_seq(os, t.args());
        os << ')';
      }
      break;
    }
  }
  if (!t.annotations().empty()) {
    os << '[';
    print_seq(os, t.annotations());
    os << ']';
  }
}

void collect_vars(const Term& t, std::vector<std::string>& out) {
  if (t.is_var()) {
    if (!t.is_anonymous() &&
        std::find(out.begin(), out.end(), t.name()) == out.end())
      out.push_back(t.name());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out);
  for (const auto& a : t.annotations()) collect_vars(a, out);
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  print(os, t);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  print(os, t);
  return os;
}

std::vector<std::string> variables_of(const Term& t) {
  std::vector<std::string> out;
  collect_vars(t, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

const Term* Substitution::lookup(const std::string& var) const {
  auto it = map_.find(var);
  return it == map_.end() ? nullptr : &it->second;
}

void Substitution::bind(const std::string& var, Term value) {
  map_.insert_or_assign(var, std::move(value));
}

const Term& Substitution::walk(const Term& t) const {
  const Term* cur = &t;
  while (cur->is_var() && !cur->is_anonymous()) {
    const Term* next = lookup(cur->name());
    if (!next) break;
    cur = next;
  }
  return *cur;
}

Term Substitution::apply(const Term& t) const {
  if (t.is_var()) {
    const Term& w = walk(t);
    if (&w == &t) return t;
    Term resolved = apply(w);
    if (!t.annotations().empty()) {
      for (const auto& a : t.annotations()) resolved.annotate(apply(a));
    }
    return resolved;
  }
  if (t.args().empty() && t.annotations().empty()) return t;
  TermList args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(apply(a));
  Term out;
  if (t.is_list())
    out = Term::list(std::move(args));
  else if (t.is_structure())
    out = Term::structure(t.name(), std::move(args));
  else
    out = t.without_annotations();
  if (!t.annotations().empty()) {
    TermList annots;
    for (const auto& a : t.annotations()) annots.push_back(apply(a));
    out = out.with_annotations(std::move(annots));
  }
  return out;
}

std::string to_string(const Substitution& s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [k, v] : s.bindings()) {
    if (!first) os << ", ";
    first = false;
    os << k << "->" << s.apply(v);
  }
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------
// Unification

namespace {

bool occurs(const std::string& var, const Term& t, const Substitution& s) {
  const Term& w = s.walk(t);
  if (w.is_var()) return !w.is_anonymous() && w.name() == var;
  return std::any_of(w.args().begin(), w.args().end(),
                     [&](const Term& a) { return occurs(var, a, s); });
}

bool unify_into(const Term& a0, const Term& b0, Substitution& s) {
  const Term& a = s.walk(a0);
  const Term& b = s.walk(b0);
  if (a.is_anonymous() || b.is_anonymous()) return true;
  if (a.is_var() && b.is_var() && a.name() == b.name()) return true;
  if (a.is_var()) {
    if (occurs(a.name(), b, s)) return false;
    s.bind(a.name(), b.without_annotations());
    return true;
  }
  if (b.is_var()) {
    if (occurs(b.name(), a, s)) return false;
    s.bind(b.name(), a.without_annotations());
    return true;
  }
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::number:
      return a.value() == b.value();
    case Term::Kind::atom:
    case Term::Kind::string:
      return a.name() == b.name();
    case Term::Kind::structure:
      if (a.name() != b.name()) return false;
      [[fallthrough]];
    case Term::Kind::list:
      if (a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!unify_into(a.args()[i], b.args()[i], s)) return false;
      return true;
    case Term::Kind::variable:
      break;
  }
  return false;
}

}  // namespace

std::optional<Substitution> unify(const Term& a, const Term& b,
                                  Substitution s) {
  if (unify_into(a, b, s)) return s;
  return std::nullopt;
}

std::optional<Substitution> unify_annotations(const Term& pattern,
                                              const Term& target,
                                              Substitution s) {
  for (const auto& pa : pattern.annotations()) {
    bool matched = false;
    for (const auto& ta : target.annotations()) {
      if (auto ext = unify(pa, ta, s)) {
        s = std::move(*ext);
        matched = true;
        break;
      }
    }
    if (!matched) return std::nullopt;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Arithmetic and relations

bool is_arith_expr(const Term& t) {
  if (!t.is_structure()) return false;
  const auto& f = t.name();
  if (t.arity() == 2) return f == "+" || f == "-" || f == "*" || f == "/";
  return t.arity() == 1 && f == "-";
}

double eval_arith(const Term& e, const Substitution& s) {
  const Term& t = s.walk(e);
  if (t.is_number()) return t.value();
  if (t.is_var()) throw EvalError("unbound variable " + t.name());
  if (!is_arith_expr(t))
    throw EvalError("not a number: " + to_string(s.apply(t)));
  if (t.arity() == 1) return -eval_arith(t.args()[0], s);
  double l = eval_arith(t.args()[0], s);
  double r = eval_arith(t.args()[1], s);
  switch (t.name()[0]) {
    case '+':
      return l + r;
    case '-':
      return l - r;
    case '*':
      return l * r;
    default:
      if (r == 0.0) throw EvalError("division by zero");
      return l / r;
  }
}

std::string_view to_string(RelOp op) {
  switch (op) {
    case RelOp::lt:
      return "<";
    case RelOp::le:
      return "<=";
    case RelOp::gt:
      return ">";
    case RelOp::ge:
      return ">=";
    case RelOp::eq:
      return "==";
    case RelOp::neq:
      return "\\==";
    case RelOp::unify:
      return "=";
  }
  return "?";
}

std::optional<RelOp> parse_rel_op(std::string_view text) {
  if (text == "<") return RelOp::lt;
  if (text == "<=") return RelOp::le;
  if (text == ">") return RelOp::gt;
  if (text == ">=") return RelOp::ge;
  if (text == "==") return RelOp::eq;
  if (text == "\\==") return RelOp::neq;
  if (text == "=") return RelOp::unify;
  return std::nullopt;
}

std::optional<Substitution> eval_relation(RelOp op, const Term& l,
                                          const Term& r, Substitution s) {
  switch (op) {
    case RelOp::lt:
    case RelOp::le:
    case RelOp::gt:
    case RelOp::ge: {
      double a = eval_arith(l, s);
      double b = eval_arith(r, s);
      bool ok = op == RelOp::lt   ? a < b
                : op == RelOp::le ? a <= b
                : op == RelOp::gt ? a > b
                                  : a >= b;
      if (ok) return s;
      return std::nullopt;
    }
    case RelOp::eq:
    case RelOp::neq: {
      bool same = equal_modulo_annotations(s.apply(l), s.apply(r));
      if (same == (op == RelOp::eq)) return s;
      return std::nullopt;
    }
    case RelOp::unify: {
      Term rhs = s.walk(r);
      if (is_arith_expr(rhs)) {
        Term value = Term::number(eval_arith(rhs, s));
        return unify(l, value, std::move(s));
      }
      return unify(l, rhs, std::move(s));
    }
  }
  return std::nullopt;
}

Term rename_vars(const Term& t, std::string_view suffix) {
  if (t.is_var()) {
    if (t.is_anonymous()) return t;
    Term v = Term::var(t.name() + "#" + std::string(suffix));
    if (!t.annotations().empty()) {
      TermList annots;
      for (const auto& a : t.annotations())
        annots.push_back(rename_vars(a, suffix));
      v = v.with_annotations(std::move(annots));
    }
    return v;
  }
  if (t.args().empty() && t.annotations().empty()) return t;
  TermList args;
  for (const auto& a : t.args()) args.push_back(rename_vars(a, suffix));
  Term out = t.is_list()        ? Term::list(std::move(args))
             : t.is_structure() ? Term::structure(t.name(), std::move(args))
                                : t.without_annotations();
  if (!t.annotations().empty()) {
    TermList annots;
    for (const auto& a : t.annotations())
      annots.push_back(rename_vars(a, suffix));
    out = out.with_annotations(std::move(annots));
  }
  return out;
}

}  // namespace nxtbdi
