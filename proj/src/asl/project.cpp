#include "nxtbdi/asl/project.hpp"

#include <cctype>
#include <charconv>

#include "nxtbdi/asl/parser.hpp"

namespace nxtbdi {

std::string_view to_string(SensorKind k) {
  switch (k) {
    case SensorKind::none:
      return "none";
    case SensorKind::touch:
      return "touch";
    case SensorKind::light:
      return "light";
    case SensorKind::sound:
      return "sound";
    case SensorKind::ultrasonic:
      return "ultrasonic";
  }
  return "none";
}

std::optional<SensorKind> parse_sensor_kind(std::string_view name) {
  for (auto k : {SensorKind::none, SensorKind::touch, SensorKind::light,
                 SensorKind::sound, SensorKind::ultrasonic})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

}  // namespace nxtbdi

namespace nxtbdi::asl {

ProjectError::ProjectError(std::string agent, std::string field,
                           const std::string& what)
    : std::runtime_error("agent '" + agent + "'" +
                         (field.empty() ? "" : ", field '" + field + "'") +
                         ": " + what),
      agent_(std::move(agent)),
      field_(std::move(field)) {}

bool valid_btaddress(std::string_view addr) {
  if (addr.size() != 17) return false;
  for (std::size_t i = 0; i < addr.size(); ++i) {
    if (i % 3 == 2) {
      if (addr[i] != ':') return false;
    } else if (!std::isxdigit(static_cast<unsigned char>(addr[i]))) {
      return false;
    }
  }
  return true;
}

namespace {

struct PTok {
  enum Kind { name, string, punct, end } kind;
  std::string text;
  std::size_t line;
};

std::vector<PTok> lex(std::string_view src) {
  std::vector<PTok> out;
  std::size_t i = 0, line = 1;
  auto name_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '.' || c == '/' || c == '-';
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (src.substr(i, 2) == "/*") {
      auto close = src.find("*/", i + 2);
      if (close == std::string_view::npos)
        throw ProjectError("", "", "unterminated comment");
      for (std::size_t k = i; k < close; ++k)
        if (src[k] == '\n') ++line;
      i = close + 2;
    } else if (c == '"') {
      auto close = src.find('"', i + 1);
      if (close == std::string_view::npos)
        throw ProjectError("", "", "unterminated string on line " +
                                       std::to_string(line));
      out.push_back({PTok::string, std::string(src.substr(i + 1, close - i - 1)),
                     line});
      i = close + 1;
    } else if (std::string_view("[],=();").find(c) != std::string_view::npos) {
      out.push_back({PTok::punct, std::string(1, c), line});
      ++i;
    } else if (name_char(c)) {
      std::size_t j = i;
      while (j < src.size() && name_char(src[j])) ++j;
      out.push_back({PTok::name, std::string(src.substr(i, j - i)), line});
      i = j;
    } else {
      throw ProjectError("", "", "unexpected character '" + std::string(1, c) +
                                     "' on line " + std::to_string(line));
    }
  }
  out.push_back({PTok::end, "<end of input>", line});
  return out;
}

class ProjectParser {
 public:
  explicit ProjectParser(std::string_view src) : toks_(lex(src)) {}

  ProjectConfig parse() {
    ProjectConfig cfg;
    while (peek().kind != PTok::end) cfg.agents.push_back(agent());
    for (std::size_t i = 0; i < cfg.agents.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (cfg.agents[i].name == cfg.agents[j].name)
          throw ProjectError(cfg.agents[i].name, "", "duplicate agent name");
    return cfg;
  }

 private:
  const PTok& peek() const { return toks_[pos_]; }
  const PTok& next() {
    const PTok& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(char p) {
    if (peek().kind == PTok::punct && peek().text[0] == p) {
      next();
      return true;
    }
    return false;
  }
  void expect(char p, const std::string& agent, const char* field = "") {
    if (!accept(p))
      throw ProjectError(agent, field,
                         "expected '" + std::string(1, p) + "' on line " +
                             std::to_string(peek().line) + ", found '" +
                             peek().text + "'");
  }
  std::string name(const std::string& agent, const char* what) {
    if (peek().kind != PTok::name)
      throw ProjectError(agent, what,
                         std::string("expected ") + what + " on line " +
                             std::to_string(peek().line) + ", found '" +
                             peek().text + "'");
    return next().text;
  }

  AgentConfig agent() {
    AgentConfig a;
    a.name = name("", "agent name");
    a.source_path = name(a.name, "source");

    bool seen_motor[3] = {};
    bool seen_sensor[4] = {};
    bool seen_btname = false, seen_btaddress = false;

    expect('[', a.name);
    do {
      std::string key = name(a.name, "parameter");
      expect('=', a.name, key.c_str());
      if (peek().kind != PTok::string)
        throw ProjectError(a.name, key, "value must be a quoted string");
      std::string value = next().text;

      if (key == "btname") {
        a.btname = value;
        seen_btname = true;
      } else if (key == "btaddress") {
        if (!valid_btaddress(value))
          throw ProjectError(a.name, key,
                             "malformed address '" + value +
                                 "', expected HH:HH:HH:HH:HH:HH");
        a.btaddress = value;
        seen_btaddress = true;
      } else if (key.size() == 6 && key.rfind("motor", 0) == 0 &&
                 key[5] >= 'a' && key[5] <= 'c') {
        std::size_t idx = key[5] - 'a';
        if (value == "true" || value == "t")
          a.motors[idx] = true;
        else if (value == "false" || value == "f")
          a.motors[idx] = false;
        else
          throw ProjectError(a.name, key,
                             "expected true or false, got '" + value + "'");
        seen_motor[idx] = true;
      } else if (key.size() == 7 && key.rfind("sensor", 0) == 0 &&
                 key[6] >= '1' && key[6] <= '4') {
        std::size_t idx = key[6] - '1';
        auto kind = parse_sensor_kind(value);
        if (!kind)
          throw ProjectError(a.name, key, "unknown sensor kind '" + value + "'");
        a.sensors[idx] = *kind;
        seen_sensor[idx] = true;
      } else if (key == "sleep") {
        int ms = 0;
        auto res = std::from_chars(value.data(), value.data() + value.size(), ms);
        if (res.ec != std::errc{} || res.ptr != value.data() + value.size() ||
            ms < 1)
          throw ProjectError(a.name, key,
                             "expected a positive integer, got '" + value + "'");
        a.sleep_ms = ms;
      } else {
        throw ProjectError(a.name, key, "unknown parameter");
      }
    } while (accept(','));
    expect(']', a.name);

    if (!seen_btname) throw ProjectError(a.name, "btname", "missing");
    if (!seen_btaddress) throw ProjectError(a.name, "btaddress", "missing");
    for (int i = 0; i < 3; ++i)
      if (!seen_motor[i])
        throw ProjectError(a.name, std::string("motor") + char('a' + i),
                           "missing");
    for (int i = 0; i < 4; ++i)
      if (!seen_sensor[i])
        throw ProjectError(a.name, std::string("sensor") + char('1' + i),
                           "missing");

    if (name(a.name, "agentArchClass") != "agentArchClass")
      throw ProjectError(a.name, "agentArchClass", "expected agentArchClass");
    a.arch_class = name(a.name, "agentArchClass");
    if (name(a.name, "beliefBaseClass") != "beliefBaseClass")
      throw ProjectError(a.name, "beliefBaseClass", "expected beliefBaseClass");
    a.belief_base_class = name(a.name, "beliefBaseClass");
    if (accept('(')) {
      if (!accept(')')) {
        do {
          if (peek().kind != PTok::string)
            throw ProjectError(a.name, "beliefBaseClass",
                               "patterns must be quoted strings");
          std::string text = next().text;
          try {
            Term pattern = parse_term(text);
            if (!pattern.is_structure())
              throw ProjectError(a.name, "beliefBaseClass",
                                 "pattern '" + text + "' must be a structure");
            a.unique_patterns.push_back(std::move(pattern));
          } catch (const ParseError& e) {
            throw ProjectError(a.name, "beliefBaseClass",
                               "bad pattern '" + text + "': " + e.what());
          }
        } while (accept(','));
        expect(')', a.name, "beliefBaseClass");
      }
    }
    accept(';');
    return a;
  }

  std::vector<PTok> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ProjectConfig parse_project_file(std::string_view source) {
  return ProjectParser(source).parse();
}

}  // namespace nxtbdi::asl
