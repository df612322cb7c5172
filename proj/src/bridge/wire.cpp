#include "nxtbdi/bridge/wire.hpp"

#include <charconv>
#include <cmath>

namespace nxtbdi::bridge {

namespace {

constexpr Verb kVerbs[] = {Verb::forward, Verb::backward, Verb::rotate,
                           Verb::reverse, Verb::speed,    Verb::stop,
                           Verb::block};
constexpr PerceptKind kPercepts[] = {PerceptKind::light, PerceptKind::obstacle,
                                     PerceptKind::touching, PerceptKind::sound};

std::string_view functor_of(Verb v) {
  switch (v) {
    case Verb::forward:
      return "forward";
    case Verb::backward:
      return "backward";
    case Verb::rotate:
      return "rotate";
    case Verb::reverse:
      return "reverse";
    case Verb::speed:
      return "speed";
    case Verb::stop:
      return "stop";
    case Verb::block:
      return "block";
  }
  return "";
}

std::string_view functor_of(PerceptKind k) {
  switch (k) {
    case PerceptKind::light:
      return "light";
    case PerceptKind::obstacle:
      return "obstacle";
    case PerceptKind::touching:
      return "touching";
    case PerceptKind::sound:
      return "sound";
  }
  return "";
}

bool takes_args(Verb v) {
  return v == Verb::forward || v == Verb::backward || v == Verb::rotate ||
         v == Verb::speed;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view record) {
  Int v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw WireFormatError("bad integer '" + std::string(s) + "' in record '" +
                          std::string(record) + "'");
  return v;
}

std::pair<long long, long long> percept_range(PerceptKind k) {
  switch (k) {
    case PerceptKind::light:
      return {0, 1023};
    case PerceptKind::obstacle:
      return {0, 255};
    case PerceptKind::touching:
      return {0, 1};
    case PerceptKind::sound:
      return {0, 100};
  }
  return {0, 0};
}

std::vector<Motor> motor_list(const Term& t, const Term& whole) {
  if (!t.is_list())
    throw MalformedAction("expected a motor list in " + to_string(whole));
  std::vector<Motor> out;
  for (const auto& m : t.args()) {
    if (!m.is_atom() || m.name().size() != 1 || m.name()[0] < 'a' ||
        m.name()[0] > 'c')
      throw MalformedAction("unknown motor " + to_string(m) + " in " +
                            to_string(whole));
    out.push_back(static_cast<Motor>(m.name()[0] - 'a'));
  }
  return out;
}

std::vector<long long> number_list(const Term& t, const Term& whole) {
  if (!t.is_list())
    throw MalformedAction("expected a number list in " + to_string(whole));
  std::vector<long long> out;
  for (const auto& n : t.args()) {
    if (!n.is_number())
      throw MalformedAction("expected a number, got " + to_string(n) + " in " +
                            to_string(whole));
    out.push_back(static_cast<long long>(std::trunc(n.value())));
  }
  return out;
}

}  // namespace

std::string_view wire_name(Verb v) {
  switch (v) {
    case Verb::forward:
      return "FWD";
    case Verb::backward:
      return "BWD";
    case Verb::rotate:
      return "ROT";
    case Verb::reverse:
      return "REV";
    case Verb::speed:
      return "SPD";
    case Verb::stop:
      return "STP";
    case Verb::block:
      return "BLK";
  }
  return "";
}

std::string_view wire_name(PerceptKind k) {
  switch (k) {
    case PerceptKind::light:
      return "LIGHT";
    case PerceptKind::obstacle:
      return "OBSTACLE";
    case PerceptKind::touching:
      return "TOUCHING";
    case PerceptKind::sound:
      return "SOUND";
  }
  return "";
}

char motor_letter(Motor m) { return static_cast<char>('a' + static_cast<int>(m)); }

std::string to_wire(const WireMessage& m) {
  struct Visitor {
    std::string operator()(const ActionCommand& a) const {
      std::string out = "A|" + std::to_string(a.id) + "|" +
                        std::string(wire_name(a.verb)) + "|";
      for (std::size_t i = 0; i < a.motors.size(); ++i) {
        if (i) out += ',';
        out += motor_letter(a.motors[i]);
      }
      out += '|';
      for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(a.args[i]);
      }
      return out;
    }
    std::string operator()(const PerceptSample& p) const {
      std::string value = p.kind == PerceptKind::touching
                              ? (p.value ? "true" : "false")
                              : std::to_string(p.value);
      return "P|" + std::string(wire_name(p.kind)) + "|" +
             std::to_string(p.port) + "|" + value;
    }
    std::string operator()(const Ack& k) const {
      return "K|" + std::to_string(k.id) + (k.ok ? "" : "|FAIL");
    }
    std::string operator()(const Exit&) const { return "X"; }
  };
  return std::visit(Visitor{}, m);
}

WireMessage from_wire(std::string_view record) {
  if (!record.empty() && record.back() == '\r') record.remove_suffix(1);
  auto f = split(record, '|');
  if (f[0] == "X" && f.size() == 1) return Exit{};
  if (f[0] == "K" && (f.size() == 2 || (f.size() == 3 && f[2] == "FAIL")))
    return Ack{parse_int<std::uint64_t>(f[1], record), f.size() == 2};
  if (f[0] == "P" && f.size() == 4) {
    PerceptSample p;
    bool known = false;
    for (auto k : kPercepts)
      if (wire_name(k) == f[1]) {
        p.kind = k;
        known = true;
      }
    if (!known)
      throw WireFormatError("unknown percept kind in '" + std::string(record) +
                            "'");
    p.port = parse_int<int>(f[2], record);
    if (p.kind == PerceptKind::touching) {
      if (f[3] != "true" && f[3] != "false")
        throw WireFormatError("touching value must be true/false in '" +
                              std::string(record) + "'");
      p.value = f[3] == "true";
    } else {
      p.value = parse_int<long long>(f[3], record);
    }
    return p;
  }
  if (f[0] == "A" && f.size() == 5) {
    ActionCommand a;
    a.id = parse_int<std::uint64_t>(f[1], record);
    bool known = false;
    for (auto v : kVerbs)
      if (wire_name(v) == f[2]) {
        a.verb = v;
        known = true;
      }
    if (!known)
      throw WireFormatError("unknown verb in '" + std::string(record) + "'");
    if (!f[3].empty())
      for (auto m : split(f[3], ',')) {
        if (m.size() != 1 || m[0] < 'a' || m[0] > 'c')
          throw WireFormatError("bad motor in '" + std::string(record) + "'");
        a.motors.push_back(static_cast<Motor>(m[0] - 'a'));
      }
    if (!f[4].empty())
      for (auto n : split(f[4], ','))
        a.args.push_back(parse_int<long long>(n, record));
    return a;
  }
  throw WireFormatError("unrecognized record '" + std::string(record) + "'");
}

bool is_robot_action(const Term& t) {
  if (t.is_atom() && t.name() == "exit") return true;
  if (!t.is_structure()) return false;
  for (auto v : kVerbs)
    if (functor_of(v) == t.name()) return true;
  return false;
}

WireMessage encode_action(const Term& t, std::uint64_t id) {
  if (t.is_atom() && t.name() == "exit") return Exit{};
  if (!t.is_literal()) throw UnknownAction("not an action: " + to_string(t));
  const Verb* verb = nullptr;
  for (const auto& v : kVerbs)
    if (functor_of(v) == t.name()) verb = &v;
  if (!verb) throw UnknownAction("unknown action " + to_string(t));
  if (!t.is_ground())
    throw MalformedAction("action must be ground: " + to_string(t));

  ActionCommand cmd;
  cmd.id = id;
  cmd.verb = *verb;
  if (cmd.verb == Verb::block) {
    if (t.arity() != 1 || !t.args()[0].is_atom() ||
        (t.args()[0].name() != "true" && t.args()[0].name() != "false"))
      throw MalformedAction("block expects true or false: " + to_string(t));
    cmd.args.push_back(t.args()[0].name() == "true" ? 1 : 0);
    return cmd;
  }
  std::size_t expected = takes_args(cmd.verb) ? 2 : 1;
  if (t.arity() != expected)
    throw MalformedAction("wrong number of arguments: " + to_string(t));
  cmd.motors = motor_list(t.args()[0], t);
  if (cmd.motors.empty())
    throw MalformedAction("empty motor list: " + to_string(t));
  if (expected == 2) {
    cmd.args = number_list(t.args()[1], t);
    if (cmd.args.size() != cmd.motors.size())
      throw MalformedAction("motor and argument lists differ in length: " +
                            to_string(t));
  }
  return cmd;
}

Term decode_percept(const PerceptSample& p) {
  if (p.port < 1 || p.port > 4)
    throw MalformedPercept("port out of range: " + std::to_string(p.port));
  auto [lo, hi] = percept_range(p.kind);
  if (p.value < lo || p.value > hi)
    throw MalformedPercept(std::string(wire_name(p.kind)) +
                           " value out of range: " + std::to_string(p.value));
  Term value = p.kind == PerceptKind::touching
                   ? Term::atom(p.value ? "true" : "false")
                   : Term::number(static_cast<double>(p.value));
  return Term::structure(std::string(functor_of(p.kind)),
                         {Term::number(p.port), value})
      .with_annotations({Term::structure("source", {Term::atom("percept")})});
}

PerceptSample percept_from_term(const Term& t) {
  if (!t.is_structure() || t.arity() != 2 || !t.args()[0].is_number())
    throw MalformedPercept("not a percept: " + to_string(t));
  for (auto k : kPercepts) {
    if (functor_of(k) != t.name()) continue;
    PerceptSample p;
    p.kind = k;
    p.port = static_cast<int>(t.args()[0].value());
    const Term& v = t.args()[1];
    if (k == PerceptKind::touching) {
      if (!v.is_atom() || (v.name() != "true" && v.name() != "false"))
        throw MalformedPercept("touching expects true/false: " + to_string(t));
      p.value = v.name() == "true";
    } else {
      if (!v.is_number())
        throw MalformedPercept("percept value must be a number: " +
                               to_string(t));
      p.value = static_cast<long long>(v.value());
    }
    return p;
  }
  throw MalformedPercept("not a percept: " + to_string(t));
}

}  // namespace nxtbdi::bridge
