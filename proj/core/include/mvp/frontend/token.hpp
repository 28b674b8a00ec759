#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mvp::frontend {

enum class TokenKind : std::uint8_t {
  Identifier,
  Keyword,
  Operator,
  IntLiteral,
  FloatLiteral,
  StringLiteral,
  Indent,
  Dedent,
  Newline,
};

std::string_view token_kind_name(TokenKind kind);

/// Indent, dedent and newline carry no source text of their own.
constexpr bool is_synthetic(TokenKind kind) {
  return kind == TokenKind::Indent || kind == TokenKind::Dedent || kind == TokenKind::Newline;
}

struct Token {
  TokenKind kind;
  std::string text;
  int line = 1;  // 1-based
  int col = 1;   // 1-based byte column

  bool operator==(const Token&) const = default;
};

/// Raised by the tokenizer and the parser; the position points into the
/// offending source.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int col);

  const std::string& detail() const { return detail_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  std::string detail_;
  int line_;
  int col_;
};

/// Splits source into tokens. Comments are dropped; block structure is
/// encoded with synthetic indent/dedent/newline tokens. Inside brackets
/// line breaks are insignificant.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace mvp::frontend
