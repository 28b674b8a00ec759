#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "mvp/frontend/scope.hpp"
#include "mvp/transform/transform.hpp"

namespace mvp::transform {

using frontend::Node;
using frontend::NodeKind;
using frontend::TokenKind;

namespace {

using Path = std::vector<std::size_t>;

std::optional<long long> int_literal(const Node& n) {
  if (n.is_leaf() && n.token == TokenKind::IntLiteral) {
    try {
      return std::stoll(n.text);
    } catch (const std::out_of_range&) {
      return std::nullopt;
    }
  }
  if (n.kind == NodeKind::UnaryOperator && n.children[0].is_leaf("-")) {
    if (auto v = int_literal(n.children[1]); v && n.children[1].is_leaf()) return -*v;
  }
  return std::nullopt;
}

std::vector<const Node*> call_arguments(const Node& call) {
  std::vector<const Node*> args;
  for (std::size_t i = 2; i + 1 < call.children.size(); ++i) {
    if (!call.children[i].is_leaf(",")) args.push_back(&call.children[i]);
  }
  return args;
}

// True when a `continue` in `list` would target the enclosing loop.
bool has_own_continue(const Node& list) {
  bool found = false;
  frontend::walk(list, [&](const Node& n) {
    if (found) return false;
    if (n.kind == NodeKind::ContinueStatement) found = true;
    return n.kind != NodeKind::WhileStatement && n.kind != NodeKind::ForStatement &&
           n.kind != NodeKind::FunctionDef;
  });
  return found;
}

std::optional<long long> increment_step(const Node& stmt, const std::string& var) {
  if (stmt.kind == NodeKind::AugmentedAssignment && stmt.children[0].is_identifier() &&
      stmt.children[0].text == var) {
    const auto c = int_literal(stmt.children[2]);
    if (!c || !stmt.children[2].is_leaf() || *c == 0) return std::nullopt;
    if (stmt.children[1].text == "+=") return *c;
    if (stmt.children[1].text == "-=") return -*c;
    return std::nullopt;
  }
  if (stmt.kind == NodeKind::Assignment && stmt.children[0].is_identifier() && stmt.children[0].text == var) {
    const Node& v = stmt.children[2];
    if (v.kind != NodeKind::BinaryOperator || !v.children[0].is_identifier() || v.children[0].text != var) {
      return std::nullopt;
    }
    const auto c = int_literal(v.children[2]);
    if (!c || !v.children[2].is_leaf() || *c == 0) return std::nullopt;
    if (v.children[1].text == "+") return *c;
    if (v.children[1].text == "-") return -*c;
  }
  return std::nullopt;
}

struct Ancestry {
  std::map<const Node*, std::vector<const Node*>> chain;  // leaf -> ancestors, root first
  std::vector<std::pair<const Node*, const Node*>> resolved;  // (leaf, scope)
};

Ancestry analyse(const Node& root) {
  Ancestry a;
  std::vector<const Node*> stack;
  std::function<void(const Node&)> visit = [&](const Node& n) {
    if (n.is_leaf()) {
      if (n.token == TokenKind::Identifier) a.chain[&n] = stack;
      return;
    }
    stack.push_back(&n);
    for (const Node& c : n.children) visit(c);
    stack.pop_back();
  };
  visit(root);
  frontend::resolve_identifiers(root, [&](const Node& leaf, const Node* scope) { a.resolved.emplace_back(&leaf, scope); });
  return a;
}

class Planner {
 public:
  explicit Planner(const Node& root)
      : root_(root), info_(analyse(root)), program_bindings_(all_bindings(root)) {}

  struct Rewrite {
    Path path;  // of the loop statement
    bool for_to_while;
  };

  std::vector<Rewrite> plan(std::size_t& skipped) {
    std::vector<Rewrite> out;
    Path path;
    scan(root_, &root_, path, out, skipped);
    return out;
  }

 private:
  static std::set<std::string> all_bindings(const Node& root) {
    std::set<std::string> names = frontend::scope_bindings(root);
    frontend::walk(root, [&](const Node& n) {
      if (n.kind == NodeKind::FunctionDef) names.merge(frontend::scope_bindings(n));
      return true;
    });
    return names;
  }

  bool user_bound(const std::string& name) const { return program_bindings_.contains(name); }

  // Stop bounds that evaluate to the same value on every iteration.
  bool pure_bound(const Node& b, const Node& body, const std::string& var) const {
    if (int_literal(b)) return true;
    const std::set<std::string> assigned = frontend::block_bindings(body);
    if (b.is_identifier()) return b.text != var && !assigned.contains(b.text);
    if (b.kind == NodeKind::Parenthesized) return pure_bound(b.children[1], body, var);
    if (b.kind == NodeKind::BinaryOperator &&
        (b.children[1].text == "+" || b.children[1].text == "-" || b.children[1].text == "*")) {
      return pure_bound(b.children[0], body, var) && pure_bound(b.children[2], body, var);
    }
    if (b.kind == NodeKind::Call && b.children[0].is_identifier() && b.children[0].text == "len" &&
        !user_bound("len")) {
      const auto args = call_arguments(b);
      if (args.size() != 1 || !args[0]->is_identifier()) return false;
      const std::string& seq = args[0]->text;
      if (seq == var || assigned.contains(seq)) return false;
      // The sequence may only be read through subscripts inside the body.
      bool only_reads = true;
      std::function<void(const Node&, bool)> check = [&](const Node& n, bool as_target) {
        if (n.is_identifier() && n.text == seq) only_reads = false;
        if (n.is_leaf()) return;
        if (n.kind == NodeKind::Subscript && n.children[0].is_identifier() && n.children[0].text == seq) {
          if (as_target) only_reads = false;
          check(n.children[2], false);
          return;
        }
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          const bool target = (n.kind == NodeKind::Assignment || n.kind == NodeKind::AugmentedAssignment ||
                               n.kind == NodeKind::AnnotatedAssignment) && i == 0;
          check(n.children[i], target);
        }
      };
      check(body, false);
      return only_reads;
    }
    return false;
  }

  // Every other use of the loop variable's binding must be dead with respect
  // to the value the loop leaves behind.
  bool variable_confined(const std::string& var, const Node* scope, const Node& loop, const Node* init) const {
    for (const auto& [leaf, s] : info_.resolved) {
      if (s != scope || leaf->text != var) continue;
      const auto& chain = info_.chain.at(leaf);
      if (std::find(chain.begin(), chain.end(), &loop) != chain.end()) continue;
      if (init && std::find(chain.begin(), chain.end(), init) != chain.end()) continue;
      bool rebound = false;
      for (std::size_t i = 0; i < chain.size() && !rebound; ++i) {
        const Node* f = chain[i];
        if (f->kind != NodeKind::ForStatement || !f->children[1].is_identifier() || f->children[1].text != var) {
          continue;
        }
        const Node* iterable = &f->children[3];
        const bool in_iterable =
            leaf == iterable || std::find(chain.begin(), chain.end(), iterable) != chain.end();
        if (!in_iterable) rebound = true;
      }
      if (!rebound) return false;
    }
    return true;
  }

  bool convertible_for(const Node& loop, const Node* scope) const {
    const Node& target = loop.children[1];
    const Node& iter = loop.children[3];
    const Node& body = loop.children[5];
    if (!target.is_identifier()) return false;
    if (iter.kind != NodeKind::Call || !iter.children[0].is_identifier() || iter.children[0].text != "range" ||
        user_bound("range")) {
      return false;
    }
    const auto args = call_arguments(iter);
    if (args.empty() || args.size() > 3) return false;
    if (args.size() == 3) {
      const auto step = int_literal(*args[2]);
      if (!step || *step == 0) return false;
    }
    const Node& stop = args.size() == 1 ? *args[0] : *args[1];
    if (!pure_bound(stop, body, target.text)) return false;
    if (has_own_continue(body) || frontend::block_bindings(body).contains(target.text)) return false;
    return variable_confined(target.text, scope, loop, nullptr);
  }

  bool convertible_while(const Node& init, const Node& loop, const Node* scope) const {
    if (init.kind != NodeKind::Assignment || !init.children[0].is_identifier() || !int_literal(init.children[2])) {
      return false;
    }
    const std::string& var = init.children[0].text;
    const Node& cond = loop.children[1];
    if (cond.kind != NodeKind::Comparison || cond.children.size() != 3 || !cond.children[0].is_identifier() ||
        cond.children[0].text != var) {
      return false;
    }
    const std::string& op = cond.children[1].text;
    if (op != "<" && op != ">") return false;
    if (user_bound("range")) return false;
    const Node& body = loop.children[3];
    const auto step = increment_step(body.children.back(), var);
    if (!step || (op == "<") != (*step > 0)) return false;
    Node rest = Node::branch(NodeKind::Block, {body.children.begin(), body.children.end() - 1});
    if (has_own_continue(rest) || frontend::block_bindings(rest).contains(var)) return false;
    if (!pure_bound(cond.children[2], rest, var)) return false;
    if (frontend::block_bindings(Node::branch(NodeKind::Block, {body.children.back()})).size() != 1) return false;
    return variable_confined(var, scope, loop, &init);
  }

  void scan(const Node& node, const Node* scope, Path& path, std::vector<Rewrite>& out, std::size_t& skipped) {
    if (node.is_leaf()) return;
    const bool is_list = node.kind == NodeKind::Module || node.kind == NodeKind::Block;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const Node& child = node.children[i];
      path.push_back(i);
      if (is_list && child.kind == NodeKind::ForStatement) {
        if (convertible_for(child, scope)) {
          out.push_back({path, true});
        } else {
          ++skipped;
        }
      } else if (is_list && child.kind == NodeKind::WhileStatement) {
        if (i > 0 && convertible_while(node.children[i - 1], child, scope)) {
          out.push_back({path, false});
        } else {
          ++skipped;
        }
      }
      scan(child, child.kind == NodeKind::FunctionDef ? &child : scope, path, out, skipped);
      path.pop_back();
    }
  }

  const Node& root_;
  Ancestry info_;
  std::set<std::string> program_bindings_;
};

Node& at_path(Node& root, const Path& path, std::size_t depth) {
  Node* n = &root;
  for (std::size_t i = 0; i < depth; ++i) n = &n->children[path[i]];
  return *n;
}

Node assignment(const std::string& var, Node value) {
  return Node::branch(NodeKind::Assignment, {Node::identifier(var), Node::op("="), std::move(value)});
}

std::vector<Node> for_to_while(const Node& loop) {
  const std::string var = loop.children[1].text;
  const auto args = call_arguments(loop.children[3]);
  Node start = args.size() == 1 ? Node::integer(0) : *args[0];
  const Node& stop = args.size() == 1 ? *args[0] : *args[1];
  const long long step = args.size() == 3 ? *int_literal(*args[2]) : 1;

  Node cond = Node::branch(NodeKind::Comparison, {Node::identifier(var), Node::op(step > 0 ? "<" : ">"), stop});
  Node bump = Node::branch(NodeKind::BinaryOperator,
                           {Node::identifier(var), Node::op(step > 0 ? "+" : "-"), Node::integer(step > 0 ? step : -step)});
  Node body = loop.children[5];
  body.children.push_back(assignment(var, std::move(bump)));
  Node loop_stmt = Node::branch(NodeKind::WhileStatement,
                                {Node::keyword("while"), std::move(cond), Node::op(":"), std::move(body)});
  std::vector<Node> out;
  out.push_back(assignment(var, std::move(start)));
  out.push_back(std::move(loop_stmt));
  return out;
}

Node while_to_for(const Node& init, const Node& loop) {
  const std::string var = init.children[0].text;
  const long long start = *int_literal(init.children[2]);
  const Node& body = loop.children[3];
  const long long step = *increment_step(body.children.back(), var);
  std::vector<Node> call{Node::identifier("range"), Node::op("(")};
  if (start != 0 || step != 1) {
    call.push_back(init.children[2]);
    call.push_back(Node::op(","));
  }
  call.push_back(loop.children[1].children[2]);
  if (step != 1) {
    call.push_back(Node::op(","));
    call.push_back(Node::integer(step));
  }
  call.push_back(Node::op(")"));
  Node new_body = Node::branch(NodeKind::Block, {body.children.begin(), body.children.end() - 1});
  if (new_body.children.empty()) new_body.children.push_back(Node::branch(NodeKind::PassStatement, {Node::keyword("pass")}));
  return Node::branch(NodeKind::ForStatement,
                      {Node::keyword("for"), Node::identifier(var), Node::keyword("in"),
                       Node::branch(NodeKind::Call, std::move(call)), Node::op(":"), std::move(new_body)});
}

}  // namespace

Transformed exchange_loops(const frontend::SyntaxTree& tree) {
  Transformed out{tree, {Heuristic::LoopExchange, 0, 0, 0}};
  std::vector<Planner::Rewrite> rewrites;
  {
    Planner planner(tree.root);
    rewrites = planner.plan(out.report.skipped);
  }
  // Deepest and right-most first so that earlier paths stay valid.
  std::sort(rewrites.begin(), rewrites.end(), [](const auto& a, const auto& b) { return a.path > b.path; });
  for (const auto& rw : rewrites) {
    Node& list = at_path(out.tree.root, rw.path, rw.path.size() - 1);
    const std::size_t index = rw.path.back();
    if (rw.for_to_while) {
      std::vector<Node> replacement = for_to_while(list.children[index]);
      list.children.erase(list.children.begin() + static_cast<std::ptrdiff_t>(index));
      list.children.insert(list.children.begin() + static_cast<std::ptrdiff_t>(index),
                           std::make_move_iterator(replacement.begin()), std::make_move_iterator(replacement.end()));
    } else {
      Node replacement = while_to_for(list.children[index - 1], list.children[index]);
      list.children[index - 1] = std::move(replacement);
      list.children.erase(list.children.begin() + static_cast<std::ptrdiff_t>(index));
    }
    ++out.report.sites;
  }
  return out;
}

}  // namespace mvp::transform
