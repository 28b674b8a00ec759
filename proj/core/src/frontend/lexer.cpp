#include <algorithm>
#include <array>
#include <cctype>

#include "mvp/frontend/token.hpp"

namespace mvp::frontend {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",     "and",    "as",       "assert", "async",
    "await", "break",  "class",    "continue", "def",    "del",    "elif",
    "else",  "except", "finally",  "for",    "from",     "global", "if",
    "import", "in",    "is",       "lambda", "nonlocal", "not",    "or",
    "pass",  "raise",  "return",   "try",    "while",    "with",   "yield"};

// Longest operators first so that a prefix scan picks the maximal munch.
constexpr std::string_view kOperators[] = {
    "**=", "//=", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=",
    "**",  "//",  "+",  "-",  "*",  "/",  "%",  "<",  ">",  "=",  "(",
    ")",   "[",   "]",  "{",  "}",  ",",  ":",  "."};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (!handle_indentation()) continue;
      }
      scan_token();
    }
    if (!out_.empty() && out_.back().kind != TokenKind::Newline &&
        out_.back().kind != TokenKind::Dedent) {
      emit(TokenKind::Newline, "", line_, col());
    }
    if (depth_ > 0) throw ParseError("unclosed bracket at end of input", line_, col());
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, "", line_, 1);
    }
    return std::move(out_);
  }

 private:
  int col() const { return static_cast<int>(pos_ - line_begin_) + 1; }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void emit(TokenKind kind, std::string text, int line, int column) {
    out_.push_back(Token{kind, std::move(text), line, column});
  }

  void new_line() {
    ++pos_;
    ++line_;
    line_begin_ = pos_;
    at_line_start_ = true;
  }

  // Returns false when the whole physical line was blank or a comment.
  bool handle_indentation() {
    int width = 0;
    std::size_t p = pos_;
    for (; p < src_.size(); ++p) {
      if (src_[p] == ' ') {
        ++width;
      } else if (src_[p] == '\t') {
        width = (width / 8 + 1) * 8;
      } else if (src_[p] == '\f') {
        width = 0;
      } else {
        break;
      }
    }
    const char next = p < src_.size() ? src_[p] : '\0';
    if (next == '\0' || next == '#' || next == '\n' || next == '\r') {
      pos_ = p;
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      if (pos_ < src_.size()) new_line();
      return false;
    }
    pos_ = p;
    at_line_start_ = false;
    if (width > indents_.back()) {
      indents_.push_back(width);
      emit(TokenKind::Indent, "", line_, 1);
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::Dedent, "", line_, 1);
      }
      if (width != indents_.back()) {
        throw ParseError("inconsistent dedent", line_, col());
      }
    }
    return true;
  }

  void scan_token() {
    const char c = peek();
    if (c == ' ' || c == '\t' || c == '\f' || c == '\r') {
      ++pos_;
      return;
    }
    if (c == '#') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      return;
    }
    if (c == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
      pos_ += peek(1) == '\r' ? 2 : 1;
      ++line_;
      ++pos_;
      line_begin_ = pos_;
      return;
    }
    if (c == '\n') {
      if (depth_ == 0 && !out_.empty() && out_.back().kind != TokenKind::Newline &&
          out_.back().kind != TokenKind::Indent && out_.back().kind != TokenKind::Dedent) {
        emit(TokenKind::Newline, "", line_, col());
      }
      new_line();
      if (depth_ > 0) at_line_start_ = false;
      return;
    }
    const int line = line_;
    const int column = col();
    if (ident_start(c)) {
      const std::size_t start = pos_;
      while (ident_char(peek())) ++pos_;
      std::string word(src_.substr(start, pos_ - start));
      if (peek() == '"' || peek() == '\'') {
        throw ParseError("string prefixes are not supported", line, column);
      }
      const TokenKind kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
      emit(kind, std::move(word), line, column);
      return;
    }
    if (digit(c) || (c == '.' && digit(peek(1)))) {
      scan_number(line, column);
      return;
    }
    if (c == '"' || c == '\'') {
      scan_string(line, column);
      return;
    }
    for (std::string_view op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        if (op == "(" || op == "[" || op == "{") ++depth_;
        if (op == ")" || op == "]" || op == "}") {
          if (depth_ == 0) throw ParseError("unbalanced '" + std::string(op) + "'", line, column);
          --depth_;
        }
        pos_ += op.size();
        emit(TokenKind::Operator, std::string(op), line, column);
        return;
      }
    }
    throw ParseError(std::string("illegal character '") + c + "'", line, column);
  }

  void scan_number(int line, int column) {
    const std::size_t start = pos_;
    bool is_float = false;
    while (digit(peek())) ++pos_;
    if (peek() == '.' && digit(peek(1))) {
      is_float = true;
      ++pos_;
      while (digit(peek())) ++pos_;
    } else if (peek() == '.' && !ident_start(peek(1))) {
      is_float = true;
      ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && digit(src_[p])) {
        is_float = true;
        pos_ = p;
        while (digit(peek())) ++pos_;
      }
    }
    if (ident_char(peek())) throw ParseError("malformed number literal", line, column);
    std::string text(src_.substr(start, pos_ - start));
    if (!is_float && text.size() > 1 && text[0] == '0' &&
        text.find_first_not_of('0') != std::string::npos) {
      throw ParseError("leading zeros in integer literal", line, column);
    }
    emit(is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral, std::move(text), line, column);
  }

  void scan_string(int line, int column) {
    const std::size_t start = pos_;
    const char quote = peek();
    const bool triple = peek(1) == quote && peek(2) == quote;
    pos_ += triple ? 3 : 1;
    for (;;) {
      if (pos_ >= src_.size()) throw ParseError("unterminated string literal", line, column);
      const char c = src_[pos_];
      if (c == '\\') {
        if (peek(1) == '\n') {
          pos_ += 2;
          ++line_;
          line_begin_ = pos_;
        } else {
          pos_ += 2;
        }
        continue;
      }
      if (c == '\n') {
        if (!triple) throw ParseError("newline in string literal", line, column);
        ++pos_;
        ++line_;
        line_begin_ = pos_;
        continue;
      }
      if (c == quote) {
        if (!triple) {
          ++pos_;
          break;
        }
        if (peek(1) == quote && peek(2) == quote) {
          pos_ += 3;
          break;
        }
      }
      ++pos_;
    }
    emit(TokenKind::StringLiteral, std::string(src_.substr(start, pos_ - start)), line, column);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_begin_ = 0;
  int line_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  std::vector<int> indents_{0};
  std::vector<Token> out_;
};

}  // namespace

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Operator: return "operator";
    case TokenKind::IntLiteral: return "int-literal";
    case TokenKind::FloatLiteral: return "float-literal";
    case TokenKind::StringLiteral: return "string-literal";
    case TokenKind::Indent: return "indent";
    case TokenKind::Dedent: return "dedent";
    case TokenKind::Newline: return "newline";
  }
  return "?";
}

ParseError::ParseError(const std::string& message, int line, int col)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + message),
      detail_(message),
      line_(line),
      col_(col) {}

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace mvp::frontend
