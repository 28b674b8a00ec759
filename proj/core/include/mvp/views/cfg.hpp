#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mvp/frontend/syntax_tree.hpp"

namespace mvp::views {

enum class EdgeKind : std::uint8_t { Seq, BranchTrue, BranchFalse, LoopBack, LoopExit };

std::string_view edge_kind_name(EdgeKind kind);

/// One straight-line statement inside a basic block. Compound statements
/// (if/elif/while/for/def) contribute only their header, e.g. `while i < n :`.
struct CfgStatement {
  frontend::NodeKind kind;
  bool header = false;
  std::vector<std::string> tokens;
  /// DFS leaf index of tokens[0] within the whole program.
  std::size_t first_leaf = 0;
  /// Child-index path from the program root to the statement (or clause) node.
  std::vector<std::size_t> path;
};

struct BasicBlock {
  int id = 0;
  std::vector<CfgStatement> statements;
};

struct CfgEdge {
  int src = 0;
  int dst = 0;
  EdgeKind kind = EdgeKind::Seq;

  auto operator<=>(const CfgEdge&) const = default;
};

/// Block 0 is the entry and the last block is the exit; both are empty.
/// Interior blocks are non-empty and reachable from the entry.
struct ControlFlowGraph {
  std::vector<BasicBlock> blocks;
  std::vector<CfgEdge> edges;

  int entry() const { return 0; }
  int exit() const { return static_cast<int>(blocks.size()) - 1; }
  std::vector<CfgEdge> out_edges(int block) const;
  std::vector<CfgEdge> in_edges(int block) const;
};

/// Where a scope sits inside the whole program, so that statement paths and
/// leaf indices are program-global.
struct ScopeOrigin {
  std::vector<std::size_t> path;
  std::size_t first_leaf = 0;
};

/// Builds the CFG of one scope: a module or a function-def. Nested function
/// definitions appear as their header statement only.
ControlFlowGraph build_cfg(const frontend::Node& scope, const ScopeOrigin& origin = {});

/// CFGs of the module scope followed by every function-def in DFS order.
std::vector<ControlFlowGraph> build_program_cfgs(const frontend::SyntaxTree& tree);

inline constexpr std::string_view kBlockSentinel = "<blk>";

struct CfgTokenSequence {
  std::vector<std::string> tokens;
  /// Program leaf index per token, -1 for the sentinel.
  std::vector<long> leaf_ordinals;
};

/// Reverse-post-order walk from the entry. Successors are ranked branch-true
/// first, then by ascending block id; back edges are not re-expanded. Each
/// non-empty block emits its statement tokens, blocks separated by <blk>.
CfgTokenSequence linearize_cfg(const ControlFlowGraph& cfg);

/// Block visiting order used by linearize_cfg (all blocks, entry first).
std::vector<int> reverse_post_order(const ControlFlowGraph& cfg);

/// The program's CFG view: linearizations of build_program_cfgs joined by <blk>.
CfgTokenSequence cfg_view(const frontend::SyntaxTree& tree);

}  // namespace mvp::views
