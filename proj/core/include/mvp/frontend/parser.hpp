#pragma once

#include <span>
#include <string_view>

#include "mvp/frontend/syntax_tree.hpp"
#include "mvp/frontend/token.hpp"

namespace mvp::frontend {

/// Recursive-descent parser for the supported Python subset. Throws
/// ParseError naming the first unexpected token.
SyntaxTree parse(std::span<const Token> tokens);

/// tokenize + parse.
SyntaxTree parse_source(std::string_view source);

/// Canonical source text: 4-space indentation, single spaces around binary
/// operators, one statement per line. parse(unparse(t)) reproduces t.
std::string unparse(const SyntaxTree& tree);
std::string unparse_expression(const Node& expr);

}  // namespace mvp::frontend
