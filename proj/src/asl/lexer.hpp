#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nxtbdi::asl::detail {

enum class Tok {
  atom,      // lowercase identifier
  variable,  // Uppercase or _ identifier
  number,
  string,
  internal,  // .name
  punct,
  end
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
  double number = 0.0;
};

/// Splits agent source into tokens; `//` and `/* */` comments are skipped.
std::vector<Token> tokenize(std::string_view src);

}  // namespace nxtbdi::asl::detail
