#include "lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>

#include "nxtbdi/asl/parser.hpp"

namespace nxtbdi::asl::detail {

namespace {

constexpr std::array<std::string_view, 27> kPunct = {
    "\\==", ":-", "<-", "<=", ">=", "==", "!!", "-+", "(", ")", "[", "]", ",",
    ".",    ";",  ":",  "&",  "|",  "+",  "-",  "*",  "/", "!", "?", "<", ">",
    "="};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      std::size_t l = line, cl = col;
      auto close = src.find("*/", i + 2);
      if (close == std::string_view::npos)
        throw ParseError(l, cl, "/*", "unterminated block comment");
      advance(close + 2 - i);
      continue;
    }

    Token tok{Tok::end, {}, line, col};
    std::size_t start = i;

    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      if (j + 1 < src.size() && src[j] == '.' &&
          std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[j])))
          ++j;
      }
      tok.kind = Tok::number;
      tok.text = std::string(src.substr(start, j - start));
      std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(),
                      tok.number);
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      tok.text = std::string(src.substr(start, j - start));
      tok.kind = (std::isupper(static_cast<unsigned char>(c)) || c == '_')
                     ? Tok::variable
                     : Tok::atom;
      advance(j - i);
    } else if (c == '"') {
      std::string text;
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\\' && j + 1 < src.size()) ++j;
        if (src[j] == '\n')
          throw ParseError(line, col, "\"", "unterminated string literal");
        text.push_back(src[j]);
        ++j;
      }
      if (j >= src.size())
        throw ParseError(line, col, "\"", "unterminated string literal");
      tok.kind = Tok::string;
      tok.text = std::move(text);
      advance(j + 1 - i);
    } else if (c == '.' && i + 1 < src.size() &&
               std::islower(static_cast<unsigned char>(src[i + 1]))) {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      tok.kind = Tok::internal;
      tok.text = std::string(src.substr(start, j - start));
      advance(j - i);
    } else {
      bool found = false;
      for (auto p : kPunct) {
        if (src.substr(i, p.size()) == p) {
          tok.kind = Tok::punct;
          tok.text = std::string(p);
          advance(p.size());
          found = true;
          break;
        }
      }
      if (!found)
        throw ParseError(line, col, std::string(1, c), "unexpected character");
    }
    out.push_back(std::move(tok));
  }
  out.push_back(Token{Tok::end, "<end of input>", line, col});
  return out;
}

}  // namespace nxtbdi::asl::detail
