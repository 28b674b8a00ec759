#pragma once

#include <string>
#include <vector>

#include "mvp/frontend/syntax_tree.hpp"

namespace mvp::views {

/// DFS pre-order linearization of a syntax tree. Non-leaves contribute their
/// kind label, leaves their source text.
struct AstTokenSequence {
  std::vector<std::string> tokens;
  /// Per token: index of the leaf in DFS leaf order, or -1 for a kind label.
  std::vector<long> leaf_ordinals;
  std::string source_id;
};

AstTokenSequence linearize_ast(const frontend::SyntaxTree& tree, std::string source_id = {});
AstTokenSequence linearize_ast(const frontend::Node& node, std::string source_id = {});

}  // namespace mvp::views
