#include <map>
#include <set>

#include "mvp/frontend/scope.hpp"
#include "mvp/typing/types.hpp"

namespace mvp::typing {

using frontend::Node;
using frontend::NodeKind;
using frontend::TokenKind;

namespace {

constexpr std::string_view kNames[] = {"int",  "float", "str",      "bool",    "none", "list",
                                       "tuple", "dict", "callable", "unknown", "O"};

const std::set<std::string, std::less<>> kBuiltins = {"range", "len",   "print", "abs", "min",
                                                      "max",   "int",   "str",   "float", "bool"};

using Symbol = std::pair<const Node*, std::string>;  // (scope, name)

// Collapses evidence: one concrete type wins, anything else is unknown.
TypeLabel join(const std::set<TypeLabel>& evidence) {
  return evidence.size() == 1 ? *evidence.begin() : TypeLabel::Unknown;
}

bool numeric(TypeLabel t) { return t == TypeLabel::Int || t == TypeLabel::Float || t == TypeLabel::Bool; }

std::optional<TypeLabel> annotation_type(const Node& ann) {
  if (ann.is_leaf("None")) return TypeLabel::None;
  if (!ann.is_identifier()) return TypeLabel::Unknown;
  static const std::map<std::string, TypeLabel, std::less<>> table = {
      {"int", TypeLabel::Int},   {"float", TypeLabel::Float}, {"str", TypeLabel::Str},
      {"bool", TypeLabel::Bool}, {"list", TypeLabel::List},   {"tuple", TypeLabel::Tuple},
      {"dict", TypeLabel::Dict}};
  const auto it = table.find(ann.text);
  return it == table.end() ? TypeLabel::Unknown : it->second;
}

class Inferencer {
 public:
  explicit Inferencer(const Node& root) : root_(root) {
    frontend::resolve_identifiers(root, [&](const Node& leaf, const Node* scope) { binding_[&leaf] = scope; });
    collect_scopes(root);
  }

  void run() {
    // Re-derive every symbol from the previous round until nothing changes.
    for (int round = 0; round < 32; ++round) {
      evidence_.clear();
      returns_.clear();
      for (const Node* scope : scopes_) gather(*scope, scope);
      std::map<Symbol, TypeLabel> next = annotations_;
      for (const auto& [sym, ev] : evidence_) next.try_emplace(sym, join(ev));
      std::map<const Node*, TypeLabel> next_returns;
      for (const auto& [def, ev] : returns_) next_returns[def] = join(ev);
      if (next == types_ && next_returns == return_types_) break;
      types_ = std::move(next);
      return_types_ = std::move(next_returns);
    }
  }

  TypeLabel label(const Node& leaf) const {
    if (!leaf.is_identifier()) return TypeLabel::O;
    if (const auto it = member_.find(&leaf); it != member_.end()) return it->second;
    const auto b = binding_.find(&leaf);
    if (b == binding_.end()) return TypeLabel::Unknown;
    if (b->second == nullptr) return kBuiltins.contains(leaf.text) ? TypeLabel::Callable : TypeLabel::Unknown;
    return symbol_type({b->second, leaf.text});
  }

 private:
  void collect_scopes(const Node& root) {
    scopes_.push_back(&root);
    frontend::walk(root, [&](const Node& n) {
      if (n.kind == NodeKind::FunctionDef) {
        scopes_.push_back(&n);
        for (const Node& p : n.children[2].children) {
          if (p.kind == NodeKind::TypedParameter) annotations_[{&n, p.children[0].text}] = *annotation_type(p.children[2]);
        }
      }
      if (n.kind == NodeKind::Attribute) {
        // A member that is called is a method; other members are opaque.
        member_.emplace(&n.children[2], TypeLabel::Unknown);
      }
      if (n.kind == NodeKind::Call && n.children[0].kind == NodeKind::Attribute) {
        member_[&n.children[0].children[2]] = TypeLabel::Callable;
      }
      return true;
    });
    frontend::walk(root, [&](const Node& n) {
      if (n.kind == NodeKind::AnnotatedAssignment && n.children[0].is_identifier()) {
        annotations_[{binding_.at(&n.children[0]), n.children[0].text}] = *annotation_type(n.children[2]);
      }
      return true;
    });
  }

  TypeLabel symbol_type(const Symbol& sym) const {
    const auto it = types_.find(sym);
    return it == types_.end() ? TypeLabel::Unknown : it->second;
  }

  const Node* def_of(const Symbol& sym) const {
    const Node& scope = *sym.first;
    const Node& body = scope.kind == NodeKind::Module ? scope : frontend::body_of(scope);
    const Node* found = nullptr;
    frontend::walk(body, [&](const Node& n) {
      if (n.kind == NodeKind::FunctionDef) {
        if (n.children[1].text == sym.second) found = &n;
        return false;
      }
      return true;
    });
    return found;
  }

  void add(const Node& target, TypeLabel t) {
    if (!target.is_identifier()) return;
    const Node* scope = binding_.at(&target);
    if (scope == nullptr) return;
    // Unknown is the absence of evidence, not a conflicting type.
    if (t != TypeLabel::Unknown) evidence_[{scope, target.text}].insert(t);
  }

  void bind_target(const Node& target, const Node* value) {
    if (target.is_identifier()) {
      add(target, value ? type_of(*value) : TypeLabel::Unknown);
      return;
    }
    if (target.kind != NodeKind::Tuple && target.kind != NodeKind::List) return;
    std::vector<const Node*> slots;
    for (const Node& c : target.children) {
      if (!c.is_leaf() || c.token != TokenKind::Operator) slots.push_back(&c);
    }
    std::vector<const Node*> values;
    if (value && (value->kind == NodeKind::Tuple || value->kind == NodeKind::List)) {
      for (const Node& c : value->children) {
        if (!c.is_leaf() || c.token != TokenKind::Operator) values.push_back(&c);
      }
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
      bind_target(*slots[i], values.size() == slots.size() ? values[i] : nullptr);
    }
  }

  void gather(const Node& scope, const Node* scope_ptr) {
    const Node& body = scope.kind == NodeKind::Module ? scope : frontend::body_of(scope);
    frontend::walk(body, [&](const Node& n) {
      switch (n.kind) {
        case NodeKind::FunctionDef:
          add(n.children[1], TypeLabel::Callable);
          return false;
        case NodeKind::Assignment:
          bind_target(n.children[0], &n.children[2]);
          break;
        case NodeKind::AnnotatedAssignment:
          break;
        case NodeKind::AugmentedAssignment: {
          const std::string op = n.children[1].text.substr(0, n.children[1].text.size() - 1);
          add(n.children[0], arithmetic(op, type_of(n.children[0]), type_of(n.children[2])));
          break;
        }
        case NodeKind::ForStatement:
          bind_target(n.children[1], nullptr);
          if (n.children[1].is_identifier()) add(n.children[1], element_type(n.children[3]));
          break;
        case NodeKind::ReturnStatement:
          if (scope_ptr->kind == NodeKind::FunctionDef) {
            const TypeLabel t = n.children.size() > 1 ? type_of(n.children[1]) : TypeLabel::None;
            if (t != TypeLabel::Unknown) returns_[scope_ptr].insert(t);
          }
          break;
        default:
          break;
      }
      return true;
    });
  }

  TypeLabel element_type(const Node& iter) const {
    if (iter.kind == NodeKind::Call && iter.children[0].is_identifier() && iter.children[0].text == "range" &&
        binding_.at(&iter.children[0]) == nullptr) {
      return TypeLabel::Int;
    }
    return type_of(iter) == TypeLabel::Str ? TypeLabel::Str : TypeLabel::Unknown;
  }

  static TypeLabel arithmetic(const std::string& op, TypeLabel a, TypeLabel b) {
    if (numeric(a) && numeric(b)) {
      if (op == "/") return TypeLabel::Float;
      if (a == TypeLabel::Float || b == TypeLabel::Float) return TypeLabel::Float;
      return TypeLabel::Int;
    }
    if (op == "+" && a == b && (a == TypeLabel::Str || a == TypeLabel::List || a == TypeLabel::Tuple)) return a;
    if (op == "*" && ((a == TypeLabel::Str && b == TypeLabel::Int) || (a == TypeLabel::Int && b == TypeLabel::Str))) {
      return TypeLabel::Str;
    }
    if (op == "%" && a == TypeLabel::Str) return TypeLabel::Str;
    return TypeLabel::Unknown;
  }

  TypeLabel call_type(const Node& call) const {
    const Node& callee = call.children[0];
    if (callee.kind == NodeKind::Attribute) {
      return callee.children[2].text == "append" ? TypeLabel::None : TypeLabel::Unknown;
    }
    if (!callee.is_identifier()) return TypeLabel::Unknown;
    const Node* scope = binding_.at(&callee);
    if (scope != nullptr) {
      const Node* def = def_of({scope, callee.text});
      if (!def) return TypeLabel::Unknown;
      const auto it = return_types_.find(def);
      return it == return_types_.end() ? TypeLabel::Unknown : it->second;
    }
    static const std::map<std::string, TypeLabel, std::less<>> fixed = {
        {"len", TypeLabel::Int},  {"int", TypeLabel::Int},   {"str", TypeLabel::Str},
        {"float", TypeLabel::Float}, {"bool", TypeLabel::Bool}, {"print", TypeLabel::None}};
    if (const auto it = fixed.find(callee.text); it != fixed.end()) return it->second;
    std::vector<TypeLabel> args;
    for (std::size_t i = 2; i + 1 < call.children.size(); ++i) {
      if (!call.children[i].is_leaf(",")) args.push_back(type_of(call.children[i]));
    }
    if (callee.text == "abs" && args.size() == 1 && numeric(args[0])) {
      return args[0] == TypeLabel::Float ? TypeLabel::Float : TypeLabel::Int;
    }
    if ((callee.text == "min" || callee.text == "max") && args.size() >= 2) {
      std::set<TypeLabel> kinds(args.begin(), args.end());
      return join(kinds);
    }
    return TypeLabel::Unknown;
  }

  TypeLabel type_of(const Node& e) const {
    if (e.is_leaf()) {
      switch (e.token) {
        case TokenKind::IntLiteral: return TypeLabel::Int;
        case TokenKind::FloatLiteral: return TypeLabel::Float;
        case TokenKind::StringLiteral: return TypeLabel::Str;
        case TokenKind::Keyword:
          if (e.text == "True" || e.text == "False") return TypeLabel::Bool;
          if (e.text == "None") return TypeLabel::None;
          return TypeLabel::Unknown;
        case TokenKind::Identifier: return label(e);
        default: return TypeLabel::Unknown;
      }
    }
    switch (e.kind) {
      case NodeKind::List: return TypeLabel::List;
      case NodeKind::Tuple: return TypeLabel::Tuple;
      case NodeKind::Dict: return TypeLabel::Dict;
      case NodeKind::Parenthesized: return type_of(e.children[1]);
      case NodeKind::Comparison: return TypeLabel::Bool;
      case NodeKind::UnaryOperator:
        if (e.children[0].is_leaf("not")) return TypeLabel::Bool;
        {
          const TypeLabel t = type_of(e.children[1]);
          return t == TypeLabel::Bool ? TypeLabel::Int : (numeric(t) ? t : TypeLabel::Unknown);
        }
      case NodeKind::BinaryOperator:
        return arithmetic(e.children[1].text, type_of(e.children[0]), type_of(e.children[2]));
      case NodeKind::BooleanOperator: {
        const TypeLabel a = type_of(e.children[0]);
        return a == type_of(e.children[2]) ? a : TypeLabel::Unknown;
      }
      case NodeKind::Call: return call_type(e);
      case NodeKind::Subscript:
        return type_of(e.children[0]) == TypeLabel::Str ? TypeLabel::Str : TypeLabel::Unknown;
      default: return TypeLabel::Unknown;
    }
  }

  const Node& root_;
  std::vector<const Node*> scopes_;
  std::map<const Node*, const Node*> binding_;  // identifier leaf -> scope
  std::map<const Node*, TypeLabel> member_;     // attribute member leaves
  std::map<Symbol, TypeLabel> annotations_;
  std::map<Symbol, std::set<TypeLabel>> evidence_;
  std::map<const Node*, std::set<TypeLabel>> returns_;
  std::map<Symbol, TypeLabel> types_;
  std::map<const Node*, TypeLabel> return_types_;
};

}  // namespace

std::string_view type_label_name(TypeLabel label) { return kNames[static_cast<std::size_t>(label)]; }

std::optional<TypeLabel> parse_type_label(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kNames); ++i) {
    if (kNames[i] == name) return static_cast<TypeLabel>(i);
  }
  return std::nullopt;
}

std::vector<TypeLabel> leaf_types(const frontend::SyntaxTree& tree) {
  Inferencer inf(tree.root);
  inf.run();
  std::vector<TypeLabel> out;
  frontend::walk(tree.root, [&](const Node& n) {
    if (n.is_leaf()) out.push_back(inf.label(n));
    return true;
  });
  return out;
}

TypedTokenSequence infer_types(const frontend::SyntaxTree& tree) {
  return {frontend::leaf_texts(tree.root), leaf_types(tree)};
}

}  // namespace mvp::typing
