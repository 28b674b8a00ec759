#include "mvp/frontend/scope.hpp"

#include <map>

namespace mvp::frontend {

namespace {

void collect(const Node& list, std::set<std::string>& out, std::set<std::string>* defs) {
  for (const Node& s : list.children) {
    switch (s.kind) {
      case NodeKind::Assignment:
      case NodeKind::AnnotatedAssignment:
      case NodeKind::AugmentedAssignment:
        target_names(s.children[0], out);
        break;
      case NodeKind::FunctionDef:
        out.insert(s.children[1].text);
        if (defs) defs->insert(s.children[1].text);
        break;
      case NodeKind::ForStatement:
        target_names(s.children[1], out);
        collect(s.children[5], out, defs);
        break;
      case NodeKind::WhileStatement:
        collect(s.children[3], out, defs);
        break;
      case NodeKind::IfStatement:
        collect(s.children[3], out, defs);
        for (std::size_t i = 4; i < s.children.size(); ++i) collect(s.children[i].children.back(), out, defs);
        break;
      default:
        break;
    }
  }
}

const Node& body_list(const Node& scope) { return scope.kind == NodeKind::FunctionDef ? scope.children[4] : scope; }

template <typename NodeT, typename Visit>
class Resolver {
 public:
  explicit Resolver(const Visit& visit) : visit_(visit) {}

  void run(NodeT& root) {
    module_ = &root;
    module_names_ = scope_bindings(root);
    walk(root, nullptr);
  }

 private:
  const Node* resolve(const std::string& name, const Node* function) {
    if (function) {
      auto it = cache_.find(function);
      if (it == cache_.end()) it = cache_.emplace(function, scope_bindings(*function)).first;
      if (it->second.contains(name)) return function;
    }
    return module_names_.contains(name) ? module_ : nullptr;
  }

  void walk(NodeT& node, const Node* function) {
    if (node.is_leaf()) {
      if (node.token == TokenKind::Identifier) visit_(node, resolve(node.text, function));
      return;
    }
    switch (node.kind) {
      case NodeKind::FunctionDef:
        // The name binds in the enclosing scope; parameters and body in the
        // function's own scope.
        walk(node.children[1], function);
        walk(node.children[2], &node);
        walk(node.children[4], &node);
        return;
      case NodeKind::TypedParameter:
        walk(node.children[0], function);
        walk(node.children[2], function);
        return;
      case NodeKind::Attribute:
        walk(node.children[0], function);
        return;
      default:
        for (auto& child : node.children) walk(child, function);
    }
  }

  const Visit& visit_;
  const Node* module_ = nullptr;
  std::set<std::string> module_names_;
  std::map<const Node*, std::set<std::string>> cache_;
};

}  // namespace

void target_names(const Node& target, std::set<std::string>& out) {
  if (target.is_identifier()) {
    out.insert(target.text);
  } else if (target.kind == NodeKind::Tuple || target.kind == NodeKind::List) {
    for (const Node& c : target.children) target_names(c, out);
  }
}

std::set<std::string> scope_bindings(const Node& scope) {
  std::set<std::string> out;
  if (scope.kind == NodeKind::FunctionDef) {
    for (const Node& p : scope.children[2].children) {
      if (p.is_identifier()) out.insert(p.text);
      if (p.kind == NodeKind::TypedParameter) out.insert(p.children[0].text);
    }
  }
  collect(body_list(scope), out, nullptr);
  return out;
}

std::set<std::string> block_bindings(const Node& list) {
  std::set<std::string> out;
  collect(list, out, nullptr);
  return out;
}

std::set<std::string> scope_function_names(const Node& scope) {
  std::set<std::string> ignored;
  std::set<std::string> defs;
  collect(body_list(scope), ignored, &defs);
  return defs;
}

std::set<std::string> all_identifiers(const Node& root) {
  std::set<std::string> out;
  walk(root, [&](const Node& n) {
    if (n.is_identifier()) out.insert(n.text);
    return true;
  });
  return out;
}

void resolve_identifiers(const Node& root, const std::function<void(const Node&, const Node*)>& visit) {
  Resolver<const Node, std::function<void(const Node&, const Node*)>>(visit).run(root);
}

void resolve_identifiers(Node& root, const std::function<void(Node&, const Node*)>& visit) {
  Resolver<Node, std::function<void(Node&, const Node*)>>(visit).run(root);
}

}  // namespace mvp::frontend
