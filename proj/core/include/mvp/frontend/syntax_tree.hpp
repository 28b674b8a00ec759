#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mvp/frontend/token.hpp"

namespace mvp::frontend {

/// Node kinds of the concrete syntax tree. Every source token (other than
/// the synthetic layout tokens) appears as a Leaf, so the leaves in DFS order
/// are exactly the program's PL tokens. docs/grammar.md lists the children
/// of each kind.
enum class NodeKind : std::uint8_t {
  Leaf,
  Module,
  FunctionDef,
  Parameters,
  TypedParameter,
  Block,
  Assignment,
  AnnotatedAssignment,
  AugmentedAssignment,
  ExpressionStatement,
  IfStatement,
  ElifClause,
  ElseClause,
  WhileStatement,
  ForStatement,
  ReturnStatement,
  BreakStatement,
  ContinueStatement,
  PassStatement,
  BinaryOperator,
  UnaryOperator,
  Comparison,
  BooleanOperator,
  Call,
  Attribute,
  Subscript,
  List,
  Tuple,
  Dict,
  Parenthesized,
};

/// The label a non-leaf contributes to the AST view ("assignment", ...).
std::string_view kind_name(NodeKind kind);

bool is_statement(NodeKind kind);
bool is_compound_statement(NodeKind kind);

struct SourceSpan {
  int line = 0;
  int col = 0;
  int end_line = 0;
  int end_col = 0;
};

struct Node {
  NodeKind kind = NodeKind::Leaf;
  TokenKind token = TokenKind::Identifier;  // leaves only
  std::string text;                         // leaves only
  std::vector<Node> children;
  SourceSpan span;

  bool is_leaf() const { return kind == NodeKind::Leaf; }
  bool is_leaf(std::string_view leaf_text) const { return is_leaf() && text == leaf_text; }
  bool is_identifier() const { return is_leaf() && token == TokenKind::Identifier; }

  static Node leaf(TokenKind token, std::string text, SourceSpan span = {});
  static Node identifier(std::string name) { return leaf(TokenKind::Identifier, std::move(name)); }
  static Node keyword(std::string word) { return leaf(TokenKind::Keyword, std::move(word)); }
  static Node op(std::string symbol) { return leaf(TokenKind::Operator, std::move(symbol)); }
  static Node integer(long long value);
  static Node branch(NodeKind kind, std::vector<Node> children);
};

/// A parsed program. The root always has kind Module.
struct SyntaxTree {
  Node root;
};

/// Node-kind and leaf-text equality; spans are ignored.
bool same_structure(const Node& a, const Node& b);
inline bool same_structure(const SyntaxTree& a, const SyntaxTree& b) {
  return same_structure(a.root, b.root);
}

std::size_t node_count(const Node& node);

/// Leaf texts in DFS order.
std::vector<std::string> leaf_texts(const Node& node);

/// Pre-order walk; the visitor returns false to skip a node's children.
void walk(const Node& node, const std::function<bool(const Node&)>& visit);
void walk_mut(Node& node, const std::function<bool(Node&)>& visit);

/// Statement list owned by a Module or Block node.
inline std::vector<Node>& statements(Node& scope) { return scope.children; }

/// Body block of a function-def, while, for, elif-clause or else-clause.
const Node& body_of(const Node& compound);
Node& body_of(Node& compound);

}  // namespace mvp::frontend
