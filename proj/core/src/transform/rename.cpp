#include <map>
#include <set>
#include <utility>

#include "mvp/frontend/scope.hpp"
#include "mvp/transform/transform.hpp"

namespace mvp::transform {

using frontend::Node;
using frontend::NodeKind;

std::string_view heuristic_name(Heuristic h) {
  switch (h) {
    case Heuristic::Rename: return "rename";
    case Heuristic::LoopExchange: return "loop-exchange";
    case Heuristic::DeadCode: return "dead-code";
  }
  return "?";
}

namespace {

using Binding = std::pair<const Node*, std::string>;

struct Plan {
  std::map<Binding, std::string> fresh;
  std::vector<Binding> order;
  std::vector<std::pair<Node*, std::string>> rewrites;
};

void collect_function_bindings(const Node& scope, std::set<Binding>& out) {
  for (const std::string& name : frontend::scope_function_names(scope)) out.insert({&scope, name});
  frontend::walk(scope.kind == NodeKind::FunctionDef ? scope.children[4] : scope, [&](const Node& n) {
    if (n.kind == NodeKind::FunctionDef) {
      collect_function_bindings(n, out);
      return false;
    }
    return true;
  });
}

Plan make_plan(Node& root) {
  const std::set<std::string> taken = frontend::all_identifiers(root);
  std::set<Binding> functions;
  collect_function_bindings(root, functions);

  Plan plan;
  std::size_t next_var = 0;
  std::size_t next_func = 0;
  const auto allocate = [&](const char* prefix, std::size_t& counter) {
    for (;;) {
      std::string name = prefix + std::to_string(counter++);
      if (!taken.contains(name)) return name;
    }
  };
  frontend::resolve_identifiers(root, [&](Node& leaf, const Node* scope) {
    if (!scope) return;
    Binding key{scope, leaf.text};
    auto it = plan.fresh.find(key);
    if (it == plan.fresh.end()) {
      const bool is_function = functions.contains(key);
      it = plan.fresh.emplace(key, is_function ? allocate("FUNC_", next_func) : allocate("VAR_", next_var)).first;
      plan.order.push_back(key);
    }
    plan.rewrites.emplace_back(&leaf, it->second);
  });
  return plan;
}

}  // namespace

RenameMap plan_renaming(const frontend::SyntaxTree& tree) {
  frontend::SyntaxTree copy = tree;
  const Plan plan = make_plan(copy.root);
  RenameMap map;
  for (const Binding& key : plan.order) {
    const std::string scope = key.first->kind == NodeKind::FunctionDef ? key.first->children[1].text : "";
    map.entries.push_back({scope, key.second, plan.fresh.at(key)});
  }
  return map;
}

std::string renamed(const RenameMap& map, std::string_view scope, std::string_view original) {
  for (const RenameEntry& e : map.entries) {
    if (e.scope == scope && e.original == original) return e.fresh;
  }
  return std::string(original);
}

Transformed rename_identifiers(const frontend::SyntaxTree& tree, std::uint64_t seed) {
  Transformed out{tree, {Heuristic::Rename, 0, 0, seed}};
  const Plan plan = make_plan(out.tree.root);
  for (const auto& [leaf, name] : plan.rewrites) {
    if (leaf->text != name) {
      leaf->text = name;
      ++out.report.sites;
    }
  }
  return out;
}

}  // namespace mvp::transform
