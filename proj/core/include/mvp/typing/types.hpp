#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvp/frontend/syntax_tree.hpp"

namespace mvp::typing {

/// Type classes in fixed order; the enum value is the class index. `O`
/// marks tokens that carry no type and is never a training target.
enum class TypeLabel : std::uint8_t { Int, Float, Str, Bool, None, List, Tuple, Dict, Callable, Unknown, O };

inline constexpr std::size_t kTypeClassCount = 10;  // excludes O

std::string_view type_label_name(TypeLabel label);
std::optional<TypeLabel> parse_type_label(std::string_view name);

struct TypedTokenSequence {
  std::vector<std::string> tokens;
  std::vector<TypeLabel> labels;
};

/// Flow-insensitive rule-based inference. Returns the program's PL tokens
/// (leaves in DFS order) with a label per token: identifiers get the type of
/// the binding they refer to, everything else gets O.
TypedTokenSequence infer_types(const frontend::SyntaxTree& tree);

/// Labels only, indexed by DFS leaf ordinal.
std::vector<TypeLabel> leaf_types(const frontend::SyntaxTree& tree);

}  // namespace mvp::typing
