#include "nxtbdi/asl/program.hpp"

#include <sstream>

#include "nxtbdi/asl/parser.hpp"

namespace nxtbdi::asl {

Formula Formula::literal(Term t) {
  Formula f;
  f.kind_ = Kind::literal;
  f.term_ = std::move(t);
  return f;
}

Formula Formula::relation(RelOp op, Term lhs, Term rhs) {
  Formula f;
  f.kind_ = Kind::relation;
  f.op_ = op;
  f.term_ = std::move(lhs);
  f.rhs_ = std::move(rhs);
  return f;
}

Formula Formula::negation(Formula inner) {
  Formula f;
  f.kind_ = Kind::negation;
  f.children_.push_back(std::move(inner));
  return f;
}

Formula Formula::conjunction(std::vector<Formula> parts) {
  Formula f;
  f.kind_ = Kind::conjunction;
  f.children_ = std::move(parts);
  return f;
}

std::string to_string(const TriggerEvent& t) {
  std::string out = t.polarity == Polarity::add ? "+" : "-";
  if (t.kind == GoalKind::achieve) out += "!";
  return out + nxtbdi::to_string(t.term);
}

std::string to_string(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::truth:
      return "true";
    case Formula::Kind::literal:
      return nxtbdi::to_string(f.term());
    case Formula::Kind::relation:
      return nxtbdi::to_string(f.term()) + " " +
             std::string(nxtbdi::to_string(f.op())) + " " +
             nxtbdi::to_string(f.rhs());
    case Formula::Kind::negation: {
      const Formula& inner = f.children().front();
      bool wrap = inner.kind() == Formula::Kind::conjunction ||
                  inner.kind() == Formula::Kind::relation;
      return wrap ? "not (" + to_string(inner) + ")"
                  : "not " + to_string(inner);
    }
    case Formula::Kind::conjunction: {
      std::string out;
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += " & ";
        const Formula& c = f.children()[i];
        if (c.kind() == Formula::Kind::conjunction)
          out += "(" + to_string(c) + ")";
        else
          out += to_string(c);
      }
      return out;
    }
  }
  return {};
}

std::string to_string(const BodyStep& s) {
  using nxtbdi::to_string;
  switch (s.kind) {
    case StepKind::action:
    case StepKind::internal_action:
      return to_string(s.term);
    case StepKind::achieve:
      return "!" + to_string(s.term);
    case StepKind::achieve_async:
      return "!!" + to_string(s.term);
    case StepKind::test:
      return "?" + to_string(s.term);
    case StepKind::add_belief:
      return "+" + to_string(s.term);
    case StepKind::remove_belief:
      return "-" + to_string(s.term);
    case StepKind::replace_belief:
      return "-+" + to_string(s.term);
    case StepKind::relation:
      return to_string(s.term) + " " + std::string(to_string(s.op)) + " " +
             to_string(s.rhs);
  }
  return {};
}

std::string to_string(const Plan& p) {
  std::string out = to_string(p.trigger);
  if (p.context) out += " : " + to_string(*p.context);
  if (!p.body.empty()) {
    out += " <- ";
    for (std::size_t i = 0; i < p.body.size(); ++i) {
      if (i) out += "; ";
      out += to_string(p.body[i]);
    }
  }
  return out + ".";
}

std::string roundtrip_print(const AgentProgram& p) {
  std::ostringstream os;
  for (const auto& b : p.beliefs) os << b << ".\n";
  for (const auto& r : p.rules)
    os << r.head << " :- " << to_string(r.body) << ".\n";
  for (const auto& g : p.goals) os << '!' << g << ".\n";
  for (const auto& pl : p.plans) os << to_string(pl) << '\n';
  return os.str();
}

Formula rename_vars(const Formula& f, std::string_view suffix) {
  switch (f.kind()) {
    case Formula::Kind::literal:
      return Formula::literal(nxtbdi::rename_vars(f.term(), suffix));
    case Formula::Kind::relation:
      return Formula::relation(f.op(), nxtbdi::rename_vars(f.term(), suffix),
                               nxtbdi::rename_vars(f.rhs(), suffix));
    case Formula::Kind::negation:
      return Formula::negation(rename_vars(f.children().front(), suffix));
    case Formula::Kind::conjunction: {
      std::vector<Formula> parts;
      for (const auto& c : f.children()) parts.push_back(rename_vars(c, suffix));
      return Formula::conjunction(std::move(parts));
    }
    case Formula::Kind::truth:
      break;
  }
  return f;
}

Plan rename_vars(const Plan& p, std::string_view suffix) {
  Plan out = p;
  out.trigger.term = nxtbdi::rename_vars(p.trigger.term, suffix);
  if (p.context) out.context = rename_vars(*p.context, suffix);
  for (auto& step : out.body) {
    step.term = nxtbdi::rename_vars(step.term, suffix);
    step.rhs = nxtbdi::rename_vars(step.rhs, suffix);
  }
  return out;
}

}  // namespace nxtbdi::asl
