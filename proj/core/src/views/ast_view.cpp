#include "mvp/views/ast_view.hpp"

namespace mvp::views {

namespace {

void visit(const frontend::Node& node, AstTokenSequence& out, long& leaf) {
  if (node.is_leaf()) {
    out.tokens.push_back(node.text);
    out.leaf_ordinals.push_back(leaf++);
    return;
  }
  out.tokens.emplace_back(frontend::kind_name(node.kind));
  out.leaf_ordinals.push_back(-1);
  for (const frontend::Node& child : node.children) visit(child, out, leaf);
}

}  // namespace

AstTokenSequence linearize_ast(const frontend::Node& node, std::string source_id) {
  AstTokenSequence out;
  out.source_id = std::move(source_id);
  long leaf = 0;
  visit(node, out, leaf);
  return out;
}

AstTokenSequence linearize_ast(const frontend::SyntaxTree& tree, std::string source_id) {
  return linearize_ast(tree.root, std::move(source_id));
}

}  // namespace mvp::views
