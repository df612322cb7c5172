#include "nxtbdi/asl/parser.hpp"

#include <sstream>

#include "lexer.hpp"

namespace nxtbdi::asl {

using detail::Tok;
using detail::Token;

ParseError::ParseError(std::size_t line, std::size_t column, std::string token,
                       const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what + " near '" +
                         token + "'"),
      line_(line),
      column_(column),
      token_(std::move(token)) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(detail::tokenize(src)) {}

  AgentProgram program() {
    AgentProgram prog;
    while (!at_end()) {
      if (is_punct("!")) {
        next();
        prog.goals.push_back(literal());
        expect(".");
      } else if (is_punct("+") || is_punct("-")) {
        prog.plans.push_back(plan());
      } else {
        Term head = literal();
        if (accept(":-")) {
          Formula body = formula();
          expect(".");
          prog.rules.push_back(Rule{std::move(head), std::move(body)});
        } else {
          expect(".");
          prog.beliefs.push_back(std::move(head));
        }
      }
    }
    return prog;
  }

  Term single_term() {
    Term t = expr();
    expect_end();
    return t;
  }

  TriggerEvent single_trigger() {
    TriggerEvent t = trigger();
    expect_end();
    return t;
  }

  Formula single_formula() {
    Formula f = formula();
    expect_end();
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::end; }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::punct && peek(ahead).text == p;
  }
  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    throw ParseError(t.line, t.column, t.text, what);
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }
  void expect_end() {
    if (!at_end()) fail("unexpected trailing input");
  }

  TriggerEvent trigger() {
    TriggerEvent t;
    if (accept("+"))
      t.polarity = Polarity::add;
    else if (accept("-"))
      t.polarity = Polarity::remove;
    else
      fail("expected '+' or '-' to start a triggering event");
    if (accept("!")) t.kind = GoalKind::achieve;
    t.term = literal();
    return t;
  }

  Plan plan() {
    const Token& start = peek();
    Plan p;
    p.trigger = trigger();
    if (accept(":")) p.context = formula();
    if (accept("<-")) {
      p.body.push_back(step());
      while (accept(";")) p.body.push_back(step());
    }
    if (p.body.empty() && !p.context)
      throw ParseError(start.line, start.column, start.text,
                       "plan has neither context nor body");
    expect(".");
    return p;
  }

  BodyStep step() {
    BodyStep s;
    if (accept("!!")) {
      s.kind = StepKind::achieve_async;
      s.term = literal();
    } else if (accept("!")) {
      s.kind = StepKind::achieve;
      s.term = literal();
    } else if (accept("?")) {
      s.kind = StepKind::test;
      s.term = literal();
    } else if (accept("-+")) {
      s.kind = StepKind::replace_belief;
      s.term = literal();
    } else if (accept("+")) {
      s.kind = StepKind::add_belief;
      s.term = literal();
    } else if (accept("-")) {
      s.kind = StepKind::remove_belief;
      s.term = literal();
    } else if (peek().kind == Tok::internal) {
      std::string name = next().text;
      TermList args;
      if (accept("(")) args = arguments(")");
      s.kind = StepKind::internal_action;
      s.term = Term::structure(std::move(name), std::move(args));
    } else {
      Term lhs = expr();
      if (auto op = rel_op()) {
        s.kind = StepKind::relation;
        s.term = std::move(lhs);
        s.op = *op;
        s.rhs = expr();
      } else {
        if (!lhs.is_literal()) fail("expected an action");
        s.kind = StepKind::action;
        s.term = std::move(lhs);
      }
    }
    return s;
  }

  Formula formula() {
    std::vector<Formula> parts;
    parts.push_back(formula_unit());
    while (accept("&")) parts.push_back(formula_unit());
    if (parts.size() == 1) return std::move(parts.front());
    return Formula::conjunction(std::move(parts));
  }

  Formula formula_unit() {
    if (peek().kind == Tok::atom && peek().text == "not") {
      next();
      if (accept("(")) {
        Formula inner = formula();
        expect(")");
        return Formula::negation(std::move(inner));
      }
      return Formula::negation(formula_unit());
    }
    if (accept("(")) {
      Formula inner = formula();
      expect(")");
      return inner;
    }
    if (peek().kind == Tok::atom && peek().text == "true" &&
        !is_punct("(", 1) && !is_punct("[", 1)) {
      next();
      return Formula::truth();
    }
    Term lhs = expr();
    if (auto op = rel_op()) return Formula::relation(*op, lhs, expr());
    if (!lhs.is_literal()) fail("expected a literal or comparison");
    return Formula::literal(std::move(lhs));
  }

  std::optional<RelOp> rel_op() {
    if (peek().kind != Tok::punct) return std::nullopt;
    auto op = parse_rel_op(peek().text);
    if (op) next();
    return op;
  }

  Term literal() {
    if (peek().kind != Tok::atom) fail("expected an atom or structure");
    std::string name = next().text;
    TermList args;
    if (accept("(")) args = arguments(")");
    Term t = Term::structure(std::move(name), std::move(args));
    if (accept("[")) t = t.with_annotations(arguments("]"));
    return t;
  }

  TermList arguments(std::string_view close) {
    TermList items;
    if (accept(close)) return items;
    items.push_back(expr());
    while (accept(",")) items.push_back(expr());
    expect(close);
    return items;
  }

  Term expr() {
    Term lhs = term_mul();
    while (is_punct("+") || is_punct("-")) {
      std::string op = next().text;
      lhs = Term::structure(op, {std::move(lhs), term_mul()});
    }
    return lhs;
  }

  Term term_mul() {
    Term lhs = unary();
    while (is_punct("*") || is_punct("/")) {
      std::string op = next().text;
      lhs = Term::structure(op, {std::move(lhs), unary()});
    }
    return lhs;
  }

  Term unary() {
    if (accept("-")) {
      if (peek().kind == Tok::number) return Term::number(-next().number);
      return Term::structure("-", {unary()});
    }
    return primary();
  }

  Term primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::number:
        return Term::number(next().number);
      case Tok::variable:
        return Term::var(next().text);
      case Tok::string:
        return Term::string(next().text);
      case Tok::atom:
        return literal();
      case Tok::punct:
        if (accept("[")) return Term::list(arguments("]"));
        if (accept("(")) {
          Term inner = expr();
          expect(")");
          return inner;
        }
        break;
      default:
        break;
    }
    fail("expected a term");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

AgentProgram parse_agent_program(std::string_view source) {
  return Parser(source).program();
}

Term parse_term(std::string_view text) { return Parser(text).single_term(); }

TriggerEvent parse_trigger(std::string_view text) {
  return Parser(text).single_trigger();
}

Formula parse_formula(std::string_view text) {
  return Parser(text).single_formula();
}

}  // namespace nxtbdi::asl
