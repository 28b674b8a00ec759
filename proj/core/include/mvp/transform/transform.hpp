#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mvp/frontend/syntax_tree.hpp"

namespace mvp::transform {

enum class Heuristic : std::uint8_t { Rename, LoopExchange, DeadCode };

std::string_view heuristic_name(Heuristic h);

struct TransformReport {
  Heuristic heuristic = Heuristic::Rename;
  std::size_t sites = 0;    // rewritten leaves / loops / inserted snippets
  std::size_t skipped = 0;  // loops that did not match a convertible pattern
  std::uint64_t seed = 0;
};

struct Transformed {
  frontend::SyntaxTree tree;
  TransformReport report;
};

/// One binding of the renaming bijection. `scope` is empty for module-level
/// bindings and holds the function name otherwise.
struct RenameEntry {
  std::string scope;
  std::string original;
  std::string fresh;
};

/// Fresh names are VAR_i / FUNC_i, indexed by first occurrence in DFS order
/// and skipping any name already present in the program.
struct RenameMap {
  std::vector<RenameEntry> entries;
};

RenameMap plan_renaming(const frontend::SyntaxTree& tree);

/// The fresh name of a binding, or `original` when the map leaves it alone.
std::string renamed(const RenameMap& map, std::string_view scope, std::string_view original);

/// Scope-aware consistent renaming of user-defined functions, parameters and
/// variables. Only leaf texts change. The naming is deterministic; `seed`
/// is carried in the report.
Transformed rename_identifiers(const frontend::SyntaxTree& tree, std::uint64_t seed);

/// Rewrites `for i in range(a[, b[, c]])` as init + while + increment, and
/// the affine `i = a; while i < b: ...; i += c` pattern back into a range
/// loop. Loops whose rewrite could change behaviour are left alone and
/// counted as skipped.
Transformed exchange_loops(const frontend::SyntaxTree& tree);

/// The dead-code snippets: `_dead_k = 0`, `if False: pass`, `_dead_k = len("")`.
inline constexpr std::size_t kDeadCodePoolSize = 3;

/// Inserts one snippet from the pool at a seeded position inside a seeded
/// basic block of the program's CFGs.
Transformed insert_dead_code(const frontend::SyntaxTree& tree, std::uint64_t seed);

struct Variant {
  frontend::SyntaxTree tree;
  std::uint64_t seed = 0;
  std::vector<Heuristic> applied;
  RenameMap renames;  // empty unless Rename was applied
};

/// k variants, each from a seeded non-empty subset of the heuristics applied
/// in the order rename -> loop exchange -> dead code.
std::vector<Variant> generate_variants(const frontend::SyntaxTree& tree, std::uint64_t seed, std::size_t k);

}  // namespace mvp::transform
