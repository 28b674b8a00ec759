#include "mvp/frontend/syntax_tree.hpp"

#include <stdexcept>

namespace mvp::frontend {

std::string_view kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Leaf: return "leaf";
    case NodeKind::Module: return "module";
    case NodeKind::FunctionDef: return "function-def";
    case NodeKind::Parameters: return "parameters";
    case NodeKind::TypedParameter: return "typed-parameter";
    case NodeKind::Block: return "block";
    case NodeKind::Assignment: return "assignment";
    case NodeKind::AnnotatedAssignment: return "annotated-assignment";
    case NodeKind::AugmentedAssignment: return "augmented-assignment";
    case NodeKind::ExpressionStatement: return "expression-statement";
    case NodeKind::IfStatement: return "if-statement";
    case NodeKind::ElifClause: return "elif-clause";
    case NodeKind::ElseClause: return "else-clause";
    case NodeKind::WhileStatement: return "while-statement";
    case NodeKind::ForStatement: return "for-statement";
    case NodeKind::ReturnStatement: return "return-statement";
    case NodeKind::BreakStatement: return "break-statement";
    case NodeKind::ContinueStatement: return "continue-statement";
    case NodeKind::PassStatement: return "pass-statement";
    case NodeKind::BinaryOperator: return "binary-operator";
    case NodeKind::UnaryOperator: return "unary-operator";
    case NodeKind::Comparison: return "comparison";
    case NodeKind::BooleanOperator: return "boolean-operator";
    case NodeKind::Call: return "call";
    case NodeKind::Attribute: return "attribute";
    case NodeKind::Subscript: return "subscript";
    case NodeKind::List: return "list";
    case NodeKind::Tuple: return "tuple";
    case NodeKind::Dict: return "dict";
    case NodeKind::Parenthesized: return "parenthesized-expression";
  }
  return "?";
}

bool is_compound_statement(NodeKind kind) {
  return kind == NodeKind::FunctionDef || kind == NodeKind::IfStatement ||
         kind == NodeKind::WhileStatement || kind == NodeKind::ForStatement;
}

bool is_statement(NodeKind kind) {
  switch (kind) {
    case NodeKind::Assignment:
    case NodeKind::AnnotatedAssignment:
    case NodeKind::AugmentedAssignment:
    case NodeKind::ExpressionStatement:
    case NodeKind::ReturnStatement:
    case NodeKind::BreakStatement:
    case NodeKind::ContinueStatement:
    case NodeKind::PassStatement:
      return true;
    default:
      return is_compound_statement(kind);
  }
}

Node Node::leaf(TokenKind token, std::string text, SourceSpan span) {
  Node n;
  n.kind = NodeKind::Leaf;
  n.token = token;
  n.text = std::move(text);
  n.span = span;
  return n;
}

Node Node::integer(long long value) {
  if (value < 0) {
    return branch(NodeKind::UnaryOperator, {op("-"), leaf(TokenKind::IntLiteral, std::to_string(-value))});
  }
  return leaf(TokenKind::IntLiteral, std::to_string(value));
}

Node Node::branch(NodeKind kind, std::vector<Node> children) {
  Node n;
  n.kind = kind;
  n.children = std::move(children);
  if (!n.children.empty()) {
    n.span.line = n.children.front().span.line;
    n.span.col = n.children.front().span.col;
    n.span.end_line = n.children.back().span.end_line;
    n.span.end_col = n.children.back().span.end_col;
  }
  return n;
}

bool same_structure(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  if (a.is_leaf() && (a.text != b.text || a.token != b.token)) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_structure(a.children[i], b.children[i])) return false;
  }
  return true;
}

std::size_t node_count(const Node& node) {
  std::size_t count = 1;
  for (const Node& child : node.children) count += node_count(child);
  return count;
}

std::vector<std::string> leaf_texts(const Node& node) {
  std::vector<std::string> out;
  walk(node, [&](const Node& n) {
    if (n.is_leaf()) out.push_back(n.text);
    return true;
  });
  return out;
}

void walk(const Node& node, const std::function<bool(const Node&)>& visit) {
  if (!visit(node)) return;
  for (const Node& child : node.children) walk(child, visit);
}

void walk_mut(Node& node, const std::function<bool(Node&)>& visit) {
  if (!visit(node)) return;
  for (Node& child : node.children) walk_mut(child, visit);
}

const Node& body_of(const Node& compound) {
  if (compound.kind == NodeKind::IfStatement) return compound.children.at(3);
  if (compound.children.empty() || compound.children.back().kind != NodeKind::Block) {
    throw std::logic_error("node has no body block");
  }
  return compound.children.back();
}

Node& body_of(Node& compound) {
  return const_cast<Node&>(body_of(static_cast<const Node&>(compound)));
}

}  // namespace mvp::frontend
