#include <algorithm>

#include "mvp/frontend/parser.hpp"
#include "mvp/transform/transform.hpp"
#include "mvp/util/random.hpp"

namespace mvp::transform {

namespace {

constexpr std::size_t kMaxAttempts = 16;

Variant make_variant(const frontend::SyntaxTree& tree, std::uint64_t seed) {
  Rng rng(seed);
  const auto mask = 1 + rng.uniform(7);
  Variant v{tree, seed, {}};
  if (mask & 1U) {
    v.renames = plan_renaming(v.tree);
    v.tree = rename_identifiers(v.tree, derive_seed(seed, 1)).tree;
    v.applied.push_back(Heuristic::Rename);
  }
  if (mask & 2U) {
    v.tree = exchange_loops(v.tree).tree;
    v.applied.push_back(Heuristic::LoopExchange);
  }
  if (mask & 4U) {
    v.tree = insert_dead_code(v.tree, derive_seed(seed, 2)).tree;
    v.applied.push_back(Heuristic::DeadCode);
  }
  return v;
}

}  // namespace

std::vector<Variant> generate_variants(const frontend::SyntaxTree& tree, std::uint64_t seed, std::size_t k) {
  std::vector<Variant> out;
  std::vector<std::string> seen{frontend::unparse(tree)};
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t base = derive_seed(seed, i);
    Variant chosen = make_variant(tree, base);
    std::string text = frontend::unparse(chosen.tree);
    // Retry until the text is new; transformation-immune programs keep the last draw.
    for (std::size_t attempt = 1; attempt < kMaxAttempts && std::find(seen.begin(), seen.end(), text) != seen.end();
         ++attempt) {
      chosen = make_variant(tree, derive_seed(base, 1000 + attempt));
      text = frontend::unparse(chosen.tree);
    }
    seen.push_back(std::move(text));
    out.push_back(std::move(chosen));
  }
  return out;
}

}  // namespace mvp::transform
