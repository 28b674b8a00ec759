#include <map>
#include <set>
#include <string>

#include "mvp/frontend/parser.hpp"
#include "mvp/frontend/scope.hpp"
#include "mvp/transform/transform.hpp"
#include "mvp/util/random.hpp"
#include "mvp/views/cfg.hpp"

namespace mvp::transform {

using frontend::Node;
using frontend::NodeKind;

namespace {

using Path = std::vector<std::size_t>;

// A gap between two statements of one statement list.
struct Gap {
  Path list;
  std::size_t index = 0;
  auto operator<=>(const Gap&) const = default;
};

bool ends_flow(NodeKind kind) {
  return kind == NodeKind::ReturnStatement || kind == NodeKind::BreakStatement ||
         kind == NodeKind::ContinueStatement;
}

const Node& at_path(const Node& root, const Path& path, std::size_t depth) {
  const Node* n = &root;
  for (std::size_t i = 0; i < depth; ++i) n = &n->children[path[i]];
  return *n;
}

std::string fresh_name(const Node& root) {
  const std::set<std::string> taken = frontend::all_identifiers(root);
  for (std::size_t k = 0;; ++k) {
    std::string name = "_dead_" + std::to_string(k);
    if (!taken.contains(name)) return name;
  }
}

Node snippet(std::size_t choice, const std::string& name, bool len_available) {
  if (choice == 2 && !len_available) choice = 0;
  std::string source;
  switch (choice) {
    case 0: source = name + " = 0\n"; break;
    case 1: source = "if False:\n    pass\n"; break;
    default: source = name + " = len(\"\")\n"; break;
  }
  frontend::SyntaxTree parsed = frontend::parse_source(source);
  return std::move(parsed.root.children.front());
}

// Insertion gaps per basic block, across every scope's CFG. Gaps border a
// straight-line statement; headers only belong to blocks, they never anchor a gap.
std::vector<std::vector<Gap>> block_gaps(const frontend::SyntaxTree& tree) {
  std::vector<std::vector<Gap>> out;
  for (const views::ControlFlowGraph& cfg : views::build_program_cfgs(tree)) {
    for (const views::BasicBlock& block : cfg.blocks) {
      std::set<Gap> gaps;
      for (const views::CfgStatement& st : block.statements) {
        if (st.header || st.path.empty()) continue;
        const Node& parent = at_path(tree.root, st.path, st.path.size() - 1);
        if (parent.kind != NodeKind::Module && parent.kind != NodeKind::Block) continue;
        Path list(st.path.begin(), st.path.end() - 1);
        gaps.insert({list, st.path.back()});
        if (!ends_flow(st.kind)) gaps.insert({list, st.path.back() + 1});
      }
      if (!gaps.empty()) out.emplace_back(gaps.begin(), gaps.end());
    }
  }
  return out;
}

}  // namespace

Transformed insert_dead_code(const frontend::SyntaxTree& tree, std::uint64_t seed) {
  Transformed out{tree, {Heuristic::DeadCode, 1, 0, seed}};
  Rng rng(seed);
  const auto choice = static_cast<std::size_t>(rng.uniform(kDeadCodePoolSize));
  const bool len_available = !frontend::scope_bindings(tree.root).contains("len") && [&] {
    bool bound = false;
    frontend::walk(tree.root, [&](const Node& n) {
      if (n.kind == NodeKind::FunctionDef && frontend::scope_bindings(n).contains("len")) bound = true;
      return !bound;
    });
    return !bound;
  }();
  Node stmt = snippet(choice, fresh_name(tree.root), len_available);

  const auto blocks = block_gaps(tree);
  if (blocks.empty()) {
    out.tree.root.children.push_back(std::move(stmt));
    return out;
  }
  const auto& gaps = blocks[rng.uniform(blocks.size())];
  const Gap& gap = gaps[rng.uniform(gaps.size())];
  Node* list = &out.tree.root;
  for (std::size_t i : gap.list) list = &list->children[i];
  list->children.insert(list->children.begin() + static_cast<std::ptrdiff_t>(gap.index), std::move(stmt));
  return out;
}

}  // namespace mvp::transform
