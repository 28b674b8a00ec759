#include "mvp/views/cfg.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace mvp::views {

using frontend::Node;
using frontend::NodeKind;

std::string_view edge_kind_name(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Seq: return "seq";
    case EdgeKind::BranchTrue: return "branch-true";
    case EdgeKind::BranchFalse: return "branch-false";
    case EdgeKind::LoopBack: return "loop-back";
    case EdgeKind::LoopExit: return "loop-exit";
  }
  return "?";
}

std::vector<CfgEdge> ControlFlowGraph::out_edges(int block) const {
  std::vector<CfgEdge> out;
  for (const CfgEdge& e : edges) {
    if (e.src == block) out.push_back(e);
  }
  return out;
}

std::vector<CfgEdge> ControlFlowGraph::in_edges(int block) const {
  std::vector<CfgEdge> in;
  for (const CfgEdge& e : edges) {
    if (e.dst == block) in.push_back(e);
  }
  return in;
}

namespace {

constexpr int kNone = -1;

void collect_leaves(const Node& n, std::vector<std::string>& out) {
  if (n.is_leaf()) {
    out.push_back(n.text);
    return;
  }
  for (const Node& c : n.children) collect_leaves(c, out);
}

class CfgBuilder {
 public:
  explicit CfgBuilder(const ScopeOrigin& origin) : origin_(origin) {}

  ControlFlowGraph build(const Node& scope) {
    entry_ = new_block();
    exit_ = new_block();
    const Node* body = nullptr;
    std::vector<std::size_t> body_path = origin_.path;
    std::size_t leaf = origin_.first_leaf;
    if (scope.kind == NodeKind::Module) {
      body = &scope;
    } else if (scope.kind == NodeKind::FunctionDef) {
      body = &scope.children[4];
      body_path.push_back(4);
      for (std::size_t i = 0; i < 4; ++i) leaf += leaf_count(scope.children[i]);
    } else {
      throw std::invalid_argument("build_cfg expects a module or function-def");
    }
    cur_ = new_block();
    edge(entry_, cur_, EdgeKind::Seq);
    statement_list(*body, body_path, leaf);
    if (cur_ != kNone) edge(cur_, exit_, EdgeKind::Seq);
    return finish();
  }

 private:
  struct Loop {
    int head;
    int after;
  };

  static std::size_t leaf_count(const Node& n) {
    if (n.is_leaf()) return 1;
    std::size_t c = 0;
    for (const Node& k : n.children) c += leaf_count(k);
    return c;
  }

  int new_block() {
    raw_.emplace_back();
    return static_cast<int>(raw_.size()) - 1;
  }

  void edge(int src, int dst, EdgeKind kind) { edges_.push_back({src, dst, kind}); }

  int ensure_current() {
    if (cur_ == kNone) cur_ = new_block();
    return cur_;
  }

  void add(int block, const Node& stmt, std::size_t header_children, const std::vector<std::size_t>& path,
           std::size_t leaf) {
    CfgStatement s;
    s.kind = stmt.kind;
    s.header = header_children > 0;
    s.first_leaf = leaf;
    s.path = path;
    const std::size_t n = s.header ? header_children : stmt.children.size();
    for (std::size_t i = 0; i < n; ++i) collect_leaves(stmt.children[i], s.tokens);
    raw_[block].push_back(std::move(s));
  }

  void statement_list(const Node& list, std::vector<std::size_t>& path, std::size_t leaf) {
    for (std::size_t i = 0; i < list.children.size(); ++i) {
      const Node& stmt = list.children[i];
      path.push_back(i);
      statement(stmt, path, leaf);
      path.pop_back();
      leaf += leaf_count(stmt);
    }
  }

  // Leaf offset of child `index` within `node`.
  static std::size_t child_leaf(const Node& node, std::size_t index, std::size_t base) {
    for (std::size_t i = 0; i < index; ++i) base += leaf_count(node.children[i]);
    return base;
  }

  void statement(const Node& stmt, std::vector<std::size_t>& path, std::size_t leaf) {
    switch (stmt.kind) {
      case NodeKind::ReturnStatement:
        add(ensure_current(), stmt, 0, path, leaf);
        edge(cur_, exit_, EdgeKind::Seq);
        cur_ = kNone;
        return;
      case NodeKind::BreakStatement:
      case NodeKind::ContinueStatement: {
        if (loops_.empty()) throw std::invalid_argument("'break'/'continue' outside a loop");
        add(ensure_current(), stmt, 0, path, leaf);
        const bool is_break = stmt.kind == NodeKind::BreakStatement;
        edge(cur_, is_break ? loops_.back().after : loops_.back().head,
             is_break ? EdgeKind::LoopExit : EdgeKind::LoopBack);
        cur_ = kNone;
        return;
      }
      case NodeKind::FunctionDef:
        add(ensure_current(), stmt, 4, path, leaf);
        return;
      case NodeKind::IfStatement:
        if_statement(stmt, path, leaf);
        return;
      case NodeKind::WhileStatement:
        loop(stmt, 3, path, leaf);
        return;
      case NodeKind::ForStatement:
        loop(stmt, 5, path, leaf);
        return;
      default:
        if (!frontend::is_statement(stmt.kind)) {
          throw std::invalid_argument("unsupported statement kind in CFG: " +
                                      std::string(frontend::kind_name(stmt.kind)));
        }
        add(ensure_current(), stmt, 0, path, leaf);
        return;
    }
  }

  void branch_body(const Node& owner, std::size_t block_index, std::vector<std::size_t>& path,
                   std::size_t owner_leaf, int join) {
    path.push_back(block_index);
    statement_list(owner.children[block_index], path, child_leaf(owner, block_index, owner_leaf));
    path.pop_back();
    if (cur_ != kNone) edge(cur_, join, EdgeKind::Seq);
  }

  void if_statement(const Node& stmt, std::vector<std::size_t>& path, std::size_t leaf) {
    int cond = ensure_current();
    add(cond, stmt, 3, path, leaf);
    const int join = new_block();
    cur_ = new_block();
    edge(cond, cur_, EdgeKind::BranchTrue);
    branch_body(stmt, 3, path, leaf, join);
    bool has_else = false;
    for (std::size_t i = 4; i < stmt.children.size(); ++i) {
      const Node& clause = stmt.children[i];
      const std::size_t clause_leaf = child_leaf(stmt, i, leaf);
      path.push_back(i);
      if (clause.kind == NodeKind::ElifClause) {
        const int test = new_block();
        edge(cond, test, EdgeKind::BranchFalse);
        add(test, clause, 3, path, clause_leaf);
        cur_ = new_block();
        edge(test, cur_, EdgeKind::BranchTrue);
        branch_body(clause, 3, path, clause_leaf, join);
        cond = test;
      } else {
        has_else = true;
        cur_ = new_block();
        edge(cond, cur_, EdgeKind::BranchFalse);
        branch_body(clause, 2, path, clause_leaf, join);
      }
      path.pop_back();
    }
    if (!has_else) edge(cond, join, EdgeKind::BranchFalse);
    cur_ = join;
  }

  void loop(const Node& stmt, std::size_t header_children, std::vector<std::size_t>& path, std::size_t leaf) {
    const int head = new_block();
    if (cur_ != kNone) edge(cur_, head, EdgeKind::Seq);
    add(head, stmt, header_children, path, leaf);
    const int after = new_block();
    const int body = new_block();
    edge(head, body, EdgeKind::BranchTrue);
    edge(head, after, EdgeKind::LoopExit);
    loops_.push_back({head, after});
    cur_ = body;
    const std::size_t body_index = stmt.children.size() - 1;
    path.push_back(body_index);
    statement_list(stmt.children[body_index], path, child_leaf(stmt, body_index, leaf));
    path.pop_back();
    if (cur_ != kNone) edge(cur_, head, EdgeKind::LoopBack);
    loops_.pop_back();
    cur_ = after;
  }

  std::set<int> reachable() const {
    std::set<int> seen{entry_};
    std::vector<int> stack{entry_};
    while (!stack.empty()) {
      const int b = stack.back();
      stack.pop_back();
      for (const CfgEdge& e : edges_) {
        if (e.src == b && seen.insert(e.dst).second) stack.push_back(e.dst);
      }
    }
    return seen;
  }

  ControlFlowGraph finish() {
    // Drop unreachable blocks (code after return/break/continue).
    const std::set<int> live = reachable();
    std::erase_if(edges_, [&](const CfgEdge& e) { return !live.contains(e.src); });

    // Splice out empty interior blocks; a seq edge into one adopts the kind
    // of the edge leaving it.
    for (int b = 0; b < static_cast<int>(raw_.size()); ++b) {
      if (b == entry_ || b == exit_ || !live.contains(b) || !raw_[b].empty()) continue;
      std::vector<CfgEdge> outs;
      for (const CfgEdge& e : edges_) {
        if (e.src == b) outs.push_back(e);
      }
      if (outs.size() != 1 || outs[0].dst == b) {
        throw std::logic_error("empty block without a unique successor");
      }
      for (CfgEdge& e : edges_) {
        if (e.dst == b) {
          e.dst = outs[0].dst;
          if (e.kind == EdgeKind::Seq) e.kind = outs[0].kind;
        }
      }
      std::erase_if(edges_, [&](const CfgEdge& e) { return e.src == b; });
      dead_.insert(b);
    }

    std::map<int, int> renumber;
    ControlFlowGraph g;
    const auto keep = [&](int b) {
      renumber[b] = static_cast<int>(g.blocks.size());
      g.blocks.push_back(BasicBlock{renumber[b], std::move(raw_[b])});
    };
    keep(entry_);
    for (int b = 0; b < static_cast<int>(raw_.size()); ++b) {
      if (b == entry_ || b == exit_ || !live.contains(b) || dead_.contains(b)) continue;
      keep(b);
    }
    keep(exit_);
    std::set<CfgEdge> unique;
    for (const CfgEdge& e : edges_) {
      unique.insert({renumber.at(e.src), renumber.at(e.dst), e.kind});
    }
    g.edges.assign(unique.begin(), unique.end());
    return g;
  }

  ScopeOrigin origin_;
  std::vector<std::vector<CfgStatement>> raw_;
  std::vector<CfgEdge> edges_;
  std::vector<Loop> loops_;
  std::set<int> dead_;
  int entry_ = kNone;
  int exit_ = kNone;
  int cur_ = kNone;
};

std::size_t leaves_in(const Node& n) {
  if (n.is_leaf()) return 1;
  std::size_t c = 0;
  for (const Node& k : n.children) c += leaves_in(k);
  return c;
}

void collect_functions(const Node& node, std::vector<std::size_t>& path, std::size_t leaf,
                       std::vector<ScopeOrigin>& out, std::vector<const Node*>& nodes) {
  if (node.is_leaf()) return;
  if (node.kind == NodeKind::FunctionDef) {
    out.push_back({path, leaf});
    nodes.push_back(&node);
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    path.push_back(i);
    collect_functions(node.children[i], path, leaf, out, nodes);
    path.pop_back();
    leaf += leaves_in(node.children[i]);
  }
}

}  // namespace

ControlFlowGraph build_cfg(const Node& scope, const ScopeOrigin& origin) {
  return CfgBuilder(origin).build(scope);
}

std::vector<ControlFlowGraph> build_program_cfgs(const frontend::SyntaxTree& tree) {
  std::vector<ControlFlowGraph> out;
  out.push_back(build_cfg(tree.root));
  std::vector<ScopeOrigin> origins;
  std::vector<const Node*> nodes;
  std::vector<std::size_t> path;
  collect_functions(tree.root, path, 0, origins, nodes);
  for (std::size_t i = 0; i < nodes.size(); ++i) out.push_back(build_cfg(*nodes[i], origins[i]));
  return out;
}

std::vector<int> reverse_post_order(const ControlFlowGraph& cfg) {
  const int n = static_cast<int>(cfg.blocks.size());
  std::vector<std::vector<CfgEdge>> succ(n);
  for (const CfgEdge& e : cfg.edges) succ[e.src].push_back(e);
  for (auto& list : succ) {
    // Ranked order; the DFS walks it backwards so that the reversed
    // post-order lists higher-ranked successors first.
    std::sort(list.begin(), list.end(), [](const CfgEdge& a, const CfgEdge& b) {
      const int ra = a.kind == EdgeKind::BranchTrue ? 0 : 1;
      const int rb = b.kind == EdgeKind::BranchTrue ? 0 : 1;
      return ra != rb ? ra < rb : a.dst < b.dst;
    });
  }
  std::vector<bool> seen(n, false);
  std::vector<int> post;
  std::function<void(int)> dfs = [&](int b) {
    seen[b] = true;
    for (auto it = succ[b].rbegin(); it != succ[b].rend(); ++it) {
      if (!seen[it->dst]) dfs(it->dst);
    }
    post.push_back(b);
  };
  if (n > 0) dfs(cfg.entry());
  return {post.rbegin(), post.rend()};
}

namespace {

void append_blocks(const ControlFlowGraph& cfg, CfgTokenSequence& out) {
  for (int b : reverse_post_order(cfg)) {
    const BasicBlock& block = cfg.blocks[b];
    if (block.statements.empty()) continue;
    if (!out.tokens.empty()) {
      out.tokens.emplace_back(kBlockSentinel);
      out.leaf_ordinals.push_back(-1);
    }
    for (const CfgStatement& s : block.statements) {
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        out.tokens.push_back(s.tokens[i]);
        out.leaf_ordinals.push_back(static_cast<long>(s.first_leaf + i));
      }
    }
  }
}

}  // namespace

CfgTokenSequence linearize_cfg(const ControlFlowGraph& cfg) {
  CfgTokenSequence out;
  append_blocks(cfg, out);
  return out;
}

CfgTokenSequence cfg_view(const frontend::SyntaxTree& tree) {
  CfgTokenSequence out;
  for (const ControlFlowGraph& g : build_program_cfgs(tree)) append_blocks(g, out);
  return out;
}

}  // namespace mvp::views
