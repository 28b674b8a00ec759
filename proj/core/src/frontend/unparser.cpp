#include <span>
#include <sstream>
#include <stdexcept>

#include "mvp/frontend/parser.hpp"

namespace mvp::frontend {

namespace {

bool is_open(const Node& n) { return n.is_leaf("(") || n.is_leaf("[") || n.is_leaf("{"); }
bool is_close(const Node& n) { return n.is_leaf(")") || n.is_leaf("]") || n.is_leaf("}"); }

class Unparser {
 public:
  std::string run(const Node& module) {
    for (const Node& stmt : module.children) statement(stmt, 0);
    return out_.str();
  }

  std::string expr_text(const Node& n) {
    std::ostringstream os;
    expression(n, os);
    return os.str();
  }

 private:
  void indent(int depth) {
    for (int i = 0; i < depth; ++i) out_ << "    ";
  }

  void block(const Node& b, int depth) {
    out_ << "\n";
    for (const Node& stmt : b.children) statement(stmt, depth + 1);
  }

  void header(const Node& stmt, std::size_t count) {
    // keyword, then expressions/leaves up to (not including) the trailing ':'
    for (std::size_t i = 0; i < count; ++i) {
      if (i > 0) out_ << ' ';
      expression(stmt.children[i], out_);
    }
    out_ << ':';
  }

  void statement(const Node& s, int depth) {
    indent(depth);
    switch (s.kind) {
      case NodeKind::FunctionDef:
        out_ << "def " << s.children[1].text;
        expression(s.children[2], out_);
        out_ << ':';
        block(s.children[4], depth);
        return;
      case NodeKind::IfStatement:
        header(s, 2);
        block(s.children[3], depth);
        for (std::size_t i = 4; i < s.children.size(); ++i) {
          const Node& clause = s.children[i];
          indent(depth);
          if (clause.kind == NodeKind::ElifClause) {
            header(clause, 2);
            block(clause.children[3], depth);
          } else {
            out_ << "else:";
            block(clause.children[2], depth);
          }
        }
        return;
      case NodeKind::WhileStatement:
        header(s, 2);
        block(s.children[3], depth);
        return;
      case NodeKind::ForStatement:
        header(s, 4);
        block(s.children[5], depth);
        return;
      case NodeKind::AnnotatedAssignment:
        expression(s.children[0], out_);
        out_ << ": ";
        expression(s.children[2], out_);
        if (s.children.size() == 5) {
          out_ << " = ";
          expression(s.children[4], out_);
        }
        out_ << '\n';
        return;
      case NodeKind::Assignment:
      case NodeKind::AugmentedAssignment:
      case NodeKind::ExpressionStatement:
      case NodeKind::ReturnStatement:
      case NodeKind::BreakStatement:
      case NodeKind::ContinueStatement:
      case NodeKind::PassStatement:
        for (std::size_t i = 0; i < s.children.size(); ++i) {
          if (i > 0) out_ << ' ';
          expression(s.children[i], out_);
        }
        out_ << '\n';
        return;
      default:
        throw std::logic_error("unparse: not a statement: " + std::string(kind_name(s.kind)));
    }
  }

  // Comma-separated item lists, with or without surrounding brackets.
  void item_list(std::span<const Node> items, NodeKind kind, std::ostream& os) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      const Node& c = items[i];
      const bool last = i + 1 == items.size();
      if (c.is_leaf(",")) {
        os << ',';
        if (!last && !is_close(items[i + 1])) os << ' ';
      } else if (c.is_leaf(":") && kind == NodeKind::Dict) {
        os << ": ";
      } else if (is_open(c) || is_close(c)) {
        os << c.text;
      } else {
        expression(c, os);
      }
    }
  }

  void expression(const Node& n, std::ostream& os) {
    switch (n.kind) {
      case NodeKind::Leaf:
        os << n.text;
        return;
      case NodeKind::BinaryOperator:
      case NodeKind::BooleanOperator:
      case NodeKind::Comparison:
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i > 0) os << ' ';
          expression(n.children[i], os);
        }
        return;
      case NodeKind::UnaryOperator:
        os << n.children[0].text;
        if (n.children[0].text == "not") os << ' ';
        expression(n.children[1], os);
        return;
      case NodeKind::Attribute:
        expression(n.children[0], os);
        os << '.' << n.children[2].text;
        return;
      case NodeKind::Call:
        expression(n.children[0], os);
        item_list(std::span(n.children).subspan(1), n.kind, os);
        return;
      case NodeKind::Subscript:
        expression(n.children[0], os);
        os << '[';
        expression(n.children[2], os);
        os << ']';
        return;
      case NodeKind::TypedParameter:
        expression(n.children[0], os);
        os << ": ";
        expression(n.children[2], os);
        return;
      case NodeKind::Parameters:
      case NodeKind::List:
      case NodeKind::Tuple:
      case NodeKind::Dict:
      case NodeKind::Parenthesized:
        item_list(n.children, n.kind, os);
        return;
      default:
        throw std::logic_error("unparse: not an expression: " + std::string(kind_name(n.kind)));
    }
  }

  std::ostringstream out_;
};

}  // namespace

std::string unparse(const SyntaxTree& tree) { return Unparser().run(tree.root); }

std::string unparse_expression(const Node& expr) { return Unparser().expr_text(expr); }

}  // namespace mvp::frontend
