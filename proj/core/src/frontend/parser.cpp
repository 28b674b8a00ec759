#include "mvp/frontend/parser.hpp"

#include <algorithm>
#include <array>

namespace mvp::frontend {

namespace {


SourceSpan span_of(const Token& tok) {
  SourceSpan s{tok.line, tok.col, tok.line, tok.col + static_cast<int>(tok.text.size())};
  const auto newlines = std::count(tok.text.begin(), tok.text.end(), '\n');
  if (newlines > 0) {
    s.end_line = tok.line + static_cast<int>(newlines);
    s.end_col = static_cast<int>(tok.text.size() - tok.text.rfind('\n'));
  }
  return s;
}

bool is_assignable(const Node& n) {
  if (n.is_identifier()) return true;
  if (n.kind == NodeKind::Attribute || n.kind == NodeKind::Subscript) return true;
  if (n.kind == NodeKind::Tuple || n.kind == NodeKind::List) {
    for (const Node& c : n.children) {
      if (c.is_leaf() && c.token == TokenKind::Operator) continue;
      if (!is_assignable(c)) return false;
    }
    return true;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : toks_(tokens) {}

  SyntaxTree run() {
    std::vector<Node> body;
    while (!at_end()) body.push_back(statement());
    Node root = Node::branch(NodeKind::Module, std::move(body));
    return SyntaxTree{std::move(root)};
  }

 private:
  bool at_end() const { return pos_ >= toks_.size(); }

  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < toks_.size() ? &toks_[pos_ + ahead] : nullptr;
  }

  bool check(TokenKind kind, std::string_view text = {}) const {
    const Token* t = peek();
    return t && t->kind == kind && (text.empty() || t->text == text);
  }
  bool check_op(std::string_view text) const { return check(TokenKind::Operator, text); }
  bool check_kw(std::string_view text) const { return check(TokenKind::Keyword, text); }

  [[noreturn]] void fail(const std::string& what) const {
    if (at_end()) {
      const Token* last = toks_.empty() ? nullptr : &toks_.back();
      throw ParseError("unexpected end of input, " + what, last ? last->line : 1, last ? last->col : 1);
    }
    const Token& t = toks_[pos_];
    std::string shown = is_synthetic(t.kind) ? std::string(token_kind_name(t.kind))
                                             : std::string(token_kind_name(t.kind)) + " '" + t.text + "'";
    throw ParseError("unexpected " + shown + ", " + what, t.line, t.col);
  }

  Node take() {
    const Token& t = toks_[pos_++];
    return Node::leaf(t.kind, t.text, span_of(t));
  }

  Node expect(TokenKind kind, std::string_view text, const char* what) {
    if (!check(kind, text)) fail(std::string("expected ") + what);
    return take();
  }
  Node expect_op(std::string_view text) {
    return expect(TokenKind::Operator, text, ("'" + std::string(text) + "'").c_str());
  }
  void expect_layout(TokenKind kind) {
    if (!check(kind)) fail("expected " + std::string(token_kind_name(kind)));
    ++pos_;
  }

  // ---- statements -------------------------------------------------------

  Node statement() {
    if (check(TokenKind::Indent)) fail("unexpected indentation");
    if (check(TokenKind::Keyword)) {
      const std::string& kw = peek()->text;
      if (kw == "def") return function_def();
      if (kw == "if") return if_statement();
      if (kw == "while") return while_statement();
      if (kw == "for") return for_statement();
    }
    Node s = simple_statement();
    expect_layout(TokenKind::Newline);
    return s;
  }

  Node simple_statement() {
    if (check(TokenKind::Keyword)) {
      const std::string& kw = peek()->text;
      if (kw == "pass") return Node::branch(NodeKind::PassStatement, {take()});
      if (kw == "break") return Node::branch(NodeKind::BreakStatement, {take()});
      if (kw == "continue") return Node::branch(NodeKind::ContinueStatement, {take()});
      if (kw == "return") {
        std::vector<Node> kids{take()};
        if (!check(TokenKind::Newline)) kids.push_back(expression_list());
        return Node::branch(NodeKind::ReturnStatement, std::move(kids));
      }
      if (kw != "True" && kw != "False" && kw != "None" && kw != "not") {
        fail("unsupported statement");
      }
    }
    Node first = expression_list();
    if (check_op("=")) {
      if (!is_assignable(first)) fail("invalid assignment target");
      Node eq = take();
      Node value = expression_list();
      return Node::branch(NodeKind::Assignment, {std::move(first), std::move(eq), std::move(value)});
    }
    if (check_op(":")) {
      if (!(first.is_identifier() || first.kind == NodeKind::Attribute || first.kind == NodeKind::Subscript)) {
        fail("invalid annotation target");
      }
      std::vector<Node> kids{std::move(first), take(), expression()};
      if (check_op("=")) {
        kids.push_back(take());
        kids.push_back(expression_list());
      }
      return Node::branch(NodeKind::AnnotatedAssignment, std::move(kids));
    }
    if (check(TokenKind::Operator)) {
      const std::string& op = peek()->text;
      const bool augmented = op.size() >= 2 && op.back() == '=' && op != "==" && op != "!=" &&
                             op != "<=" && op != ">=";
      if (augmented) {
        if (!(first.is_identifier() || first.kind == NodeKind::Attribute || first.kind == NodeKind::Subscript)) {
          fail("invalid augmented assignment target");
        }
        Node opleaf = take();
        Node value = expression_list();
        return Node::branch(NodeKind::AugmentedAssignment, {std::move(first), std::move(opleaf), std::move(value)});
      }
    }
    return Node::branch(NodeKind::ExpressionStatement, {std::move(first)});
  }

  Node block() {
    std::vector<Node> body;
    if (!check(TokenKind::Newline)) {
      body.push_back(simple_statement());
      expect_layout(TokenKind::Newline);
      return Node::branch(NodeKind::Block, std::move(body));
    }
    ++pos_;
    expect_layout(TokenKind::Indent);
    while (!check(TokenKind::Dedent)) {
      if (at_end()) fail("expected dedent");
      body.push_back(statement());
    }
    ++pos_;
    return Node::branch(NodeKind::Block, std::move(body));
  }

  Node function_def() {
    std::vector<Node> kids{take()};
    kids.push_back(expect(TokenKind::Identifier, {}, "function name"));
    std::vector<Node> params{expect_op("(")};
    while (!check_op(")")) {
      Node name = expect(TokenKind::Identifier, {}, "parameter name");
      if (check_op(":")) {
        Node colon = take();
        Node annotation = expression();
        params.push_back(Node::branch(NodeKind::TypedParameter, {std::move(name), std::move(colon), std::move(annotation)}));
      } else {
        params.push_back(std::move(name));
      }
      if (check_op(",")) {
        params.push_back(take());
      } else if (!check_op(")")) {
        fail("expected ',' or ')'");
      }
    }
    params.push_back(take());
    kids.push_back(Node::branch(NodeKind::Parameters, std::move(params)));
    kids.push_back(expect_op(":"));
    kids.push_back(block());
    return Node::branch(NodeKind::FunctionDef, std::move(kids));
  }

  Node if_statement() {
    std::vector<Node> kids{take(), expression()};
    kids.push_back(expect_op(":"));
    kids.push_back(block());
    while (check_kw("elif")) {
      std::vector<Node> clause{take(), expression()};
      clause.push_back(expect_op(":"));
      clause.push_back(block());
      kids.push_back(Node::branch(NodeKind::ElifClause, std::move(clause)));
    }
    if (check_kw("else")) {
      std::vector<Node> clause{take()};
      clause.push_back(expect_op(":"));
      clause.push_back(block());
      kids.push_back(Node::branch(NodeKind::ElseClause, std::move(clause)));
    }
    return Node::branch(NodeKind::IfStatement, std::move(kids));
  }

  Node while_statement() {
    std::vector<Node> kids{take(), expression()};
    kids.push_back(expect_op(":"));
    kids.push_back(block());
    if (check_kw("else")) fail("while-else is not supported");
    return Node::branch(NodeKind::WhileStatement, std::move(kids));
  }

  Node for_statement() {
    std::vector<Node> kids{take()};
    Node target = target_list();
    if (!is_assignable(target)) fail("invalid loop target");
    kids.push_back(std::move(target));
    kids.push_back(expect(TokenKind::Keyword, "in", "'in'"));
    kids.push_back(expression_list());
    kids.push_back(expect_op(":"));
    kids.push_back(block());
    if (check_kw("else")) fail("for-else is not supported");
    return Node::branch(NodeKind::ForStatement, std::move(kids));
  }

  // ---- expressions ------------------------------------------------------

  // Loop targets stop before 'in', so they cannot go through comparison().
  Node target_list() {
    Node first = primary();
    if (!check_op(",")) return first;
    std::vector<Node> items{std::move(first)};
    while (check_op(",")) {
      items.push_back(take());
      if (check_kw("in")) break;
      items.push_back(primary());
    }
    return Node::branch(NodeKind::Tuple, std::move(items));
  }

  bool starts_expression() const {
    const Token* t = peek();
    if (!t) return false;
    switch (t->kind) {
      case TokenKind::Identifier:
      case TokenKind::IntLiteral:
      case TokenKind::FloatLiteral:
      case TokenKind::StringLiteral:
        return true;
      case TokenKind::Keyword:
        return t->text == "True" || t->text == "False" || t->text == "None" || t->text == "not";
      case TokenKind::Operator:
        return t->text == "(" || t->text == "[" || t->text == "{" || t->text == "-" || t->text == "+";
      default:
        return false;
    }
  }

  // Bare comma-separated list; a single element without a comma stays as is.
  Node expression_list() {
    Node first = expression();
    if (!check_op(",")) return first;
    std::vector<Node> items{std::move(first)};
    while (check_op(",")) {
      items.push_back(take());
      if (!starts_expression()) break;
      items.push_back(expression());
    }
    return Node::branch(NodeKind::Tuple, std::move(items));
  }

  Node expression() { return or_test(); }

  Node or_test() {
    Node left = and_test();
    while (check_kw("or")) {
      Node op = take();
      Node right = and_test();
      left = Node::branch(NodeKind::BooleanOperator, {std::move(left), std::move(op), std::move(right)});
    }
    return left;
  }

  Node and_test() {
    Node left = not_test();
    while (check_kw("and")) {
      Node op = take();
      Node right = not_test();
      left = Node::branch(NodeKind::BooleanOperator, {std::move(left), std::move(op), std::move(right)});
    }
    return left;
  }

  Node not_test() {
    if (check_kw("not")) {
      Node op = take();
      Node operand = not_test();
      return Node::branch(NodeKind::UnaryOperator, {std::move(op), std::move(operand)});
    }
    return comparison();
  }

  bool at_comparison_op() const {
    static constexpr std::array<std::string_view, 6> ops = {"<", ">", "==", "!=", "<=", ">="};
    if (check(TokenKind::Operator)) {
      return std::find(ops.begin(), ops.end(), peek()->text) != ops.end();
    }
    if (check_kw("in") || check_kw("is")) return true;
    const Token* next = peek(1);
    return check_kw("not") && next && next->kind == TokenKind::Keyword && next->text == "in";
  }

  Node comparison() {
    Node first = arith();
    if (!at_comparison_op()) return first;
    std::vector<Node> kids{std::move(first)};
    while (at_comparison_op()) {
      if (check_kw("not")) {
        kids.push_back(take());
        kids.push_back(take());
      } else if (check_kw("is")) {
        kids.push_back(take());
        if (check_kw("not")) kids.push_back(take());
      } else {
        kids.push_back(take());
      }
      kids.push_back(arith());
    }
    return Node::branch(NodeKind::Comparison, std::move(kids));
  }

  Node arith() {
    Node left = term();
    while (check_op("+") || check_op("-")) {
      Node op = take();
      Node right = term();
      left = Node::branch(NodeKind::BinaryOperator, {std::move(left), std::move(op), std::move(right)});
    }
    return left;
  }

  Node term() {
    Node left = factor();
    while (check_op("*") || check_op("/") || check_op("//") || check_op("%")) {
      Node op = take();
      Node right = factor();
      left = Node::branch(NodeKind::BinaryOperator, {std::move(left), std::move(op), std::move(right)});
    }
    return left;
  }

  Node factor() {
    if (check_op("-") || check_op("+")) {
      Node op = take();
      Node operand = factor();
      return Node::branch(NodeKind::UnaryOperator, {std::move(op), std::move(operand)});
    }
    return power();
  }

  Node power() {
    Node base = primary();
    if (check_op("**")) {
      Node op = take();
      Node exponent = factor();
      return Node::branch(NodeKind::BinaryOperator, {std::move(base), std::move(op), std::move(exponent)});
    }
    return base;
  }

  Node primary() {
    Node node = atom();
    for (;;) {
      if (check_op("(")) {
        std::vector<Node> kids{std::move(node), take()};
        while (!check_op(")")) {
          kids.push_back(expression());
          if (check_op("=")) fail("keyword arguments are not supported");
          if (check_op(",")) {
            kids.push_back(take());
          } else if (!check_op(")")) {
            fail("expected ',' or ')'");
          }
        }
        kids.push_back(take());
        node = Node::branch(NodeKind::Call, std::move(kids));
      } else if (check_op(".")) {
        Node dot = take();
        Node name = expect(TokenKind::Identifier, {}, "attribute name");
        node = Node::branch(NodeKind::Attribute, {std::move(node), std::move(dot), std::move(name)});
      } else if (check_op("[")) {
        Node open = take();
        Node index = expression_list();
        if (check_op(":")) fail("slices are not supported");
        Node close = expect_op("]");
        node = Node::branch(NodeKind::Subscript, {std::move(node), std::move(open), std::move(index), std::move(close)});
      } else {
        return node;
      }
    }
  }

  Node atom() {
    const Token* t = peek();
    if (!t) fail("expected an expression");
    switch (t->kind) {
      case TokenKind::Identifier:
      case TokenKind::IntLiteral:
      case TokenKind::FloatLiteral:
        return take();
      case TokenKind::StringLiteral: {
        Node s = take();
        if (check(TokenKind::StringLiteral)) fail("implicit string concatenation is not supported");
        return s;
      }
      case TokenKind::Keyword:
        if (t->text == "True" || t->text == "False" || t->text == "None") return take();
        fail("expected an expression");
      case TokenKind::Operator:
        if (t->text == "(") return parenthesized();
        if (t->text == "[") return bracketed(NodeKind::List, "]");
        if (t->text == "{") return dict();
        fail("expected an expression");
      default:
        fail("expected an expression");
    }
  }

  Node parenthesized() {
    Node open = take();
    if (check_op(")")) return Node::branch(NodeKind::Tuple, {std::move(open), take()});
    Node first = expression();
    if (check_op(")")) {
      return Node::branch(NodeKind::Parenthesized, {std::move(open), std::move(first), take()});
    }
    std::vector<Node> kids{std::move(open), std::move(first)};
    while (check_op(",")) {
      kids.push_back(take());
      if (check_op(")")) break;
      kids.push_back(expression());
    }
    kids.push_back(expect_op(")"));
    return Node::branch(NodeKind::Tuple, std::move(kids));
  }

  Node bracketed(NodeKind kind, std::string_view close) {
    std::vector<Node> kids{take()};
    while (!check_op(close)) {
      kids.push_back(expression());
      if (check_op(",")) {
        kids.push_back(take());
      } else if (!check_op(close)) {
        fail("expected ',' or '" + std::string(close) + "'");
      }
    }
    kids.push_back(take());
    return Node::branch(kind, std::move(kids));
  }

  Node dict() {
    std::vector<Node> kids{take()};
    while (!check_op("}")) {
      kids.push_back(expression());
      kids.push_back(expect_op(":"));
      kids.push_back(expression());
      if (check_op(",")) {
        kids.push_back(take());
      } else if (!check_op("}")) {
        fail("expected ',' or '}'");
      }
    }
    kids.push_back(take());
    return Node::branch(NodeKind::Dict, std::move(kids));
  }

  std::span<const Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

SyntaxTree parse(std::span<const Token> tokens) { return Parser(tokens).run(); }

SyntaxTree parse_source(std::string_view source) {
  const std::vector<Token> tokens = tokenize(source);
  return parse(tokens);
}

}  // namespace mvp::frontend
