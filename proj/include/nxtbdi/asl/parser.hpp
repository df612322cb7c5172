#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "nxtbdi/asl/program.hpp"

namespace nxtbdi::asl {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string token,
             const std::string& what);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string token_;
};

AgentProgram parse_agent_program(std::string_view source);

/// Single term, e.g. a uniqueness pattern `light(port,_)`.
Term parse_term(std::string_view text);

/// Trigger pattern as used by `.wait("+light(_,_)")`.
TriggerEvent parse_trigger(std::string_view text);

Formula parse_formula(std::string_view text);

/// Canonical text; parsing it back yields an equal program.
std::string roundtrip_print(const AgentProgram& p);

}  // namespace nxtbdi::asl
