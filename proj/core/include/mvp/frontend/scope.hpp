#pragma once

#include <functional>
#include <set>
#include <string>

#include "mvp/frontend/syntax_tree.hpp"

namespace mvp::frontend {

/// Names bound directly in a scope (a Module or FunctionDef node):
/// parameters, assignment/for targets and nested def names. Nested function
/// bodies are not entered.
std::set<std::string> scope_bindings(const Node& scope);

/// Names bound anywhere in a statement list (a Module or Block), without
/// entering nested function bodies.
std::set<std::string> block_bindings(const Node& list);

/// Names bound by `def` directly in a scope.
std::set<std::string> scope_function_names(const Node& scope);

/// Every identifier text in the program, attribute member names included.
std::set<std::string> all_identifiers(const Node& root);

/// Visits each identifier leaf that names a variable or function, together
/// with the scope node whose binding it refers to (nullptr for free names
/// such as builtins). Attribute member names are not visited. Resolution is
/// local-then-module: nested functions do not close over enclosing locals.
void resolve_identifiers(const Node& root, const std::function<void(const Node& leaf, const Node* scope)>& visit);
void resolve_identifiers(Node& root, const std::function<void(Node& leaf, const Node* scope)>& visit);

/// Adds identifiers bound by an assignment or loop target to `out`.
void target_names(const Node& target, std::set<std::string>& out);

}  // namespace mvp::frontend
