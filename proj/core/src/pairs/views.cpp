#include "mvp/pairs/views.hpp"

#include "mvp/transform/transform.hpp"
#include "mvp/views/ast_view.hpp"
#include "mvp/views/cfg.hpp"

namespace mvp::pairs {

using typing::TypeLabel;

namespace {

constexpr std::string_view kViewNames[] = {"NL", "PL", "AST", "CFG", "PT"};

std::vector<TypeLabel> pick(const std::vector<TypeLabel>& leaf_labels, const std::vector<long>& ordinals) {
  std::vector<TypeLabel> out;
  out.reserve(ordinals.size());
  for (long o : ordinals) out.push_back(o < 0 ? TypeLabel::O : leaf_labels[static_cast<std::size_t>(o)]);
  return out;
}

}  // namespace

std::string_view view_name(ViewKind view) { return kViewNames[static_cast<std::size_t>(view)]; }

std::optional<ViewKind> parse_view(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kViewNames); ++i) {
    if (kViewNames[i] == name) return static_cast<ViewKind>(i);
  }
  return std::nullopt;
}

std::vector<std::string> nl_words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      if (!current.empty()) out.push_back(std::exchange(current, {}));
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

std::vector<ViewRecord> extract_views(const frontend::SyntaxTree& tree, const std::string& sample_id,
                                      const std::optional<std::string>& nl, std::uint64_t pt_seed) {
  std::vector<ViewRecord> out;
  if (nl) {
    std::vector<std::string> words = nl_words(*nl);
    std::vector<TypeLabel> labels(words.size(), TypeLabel::O);
    out.push_back({sample_id, ViewKind::NL, std::move(words), std::move(labels), std::nullopt});
  }
  typing::TypedTokenSequence pl = typing::infer_types(tree);
  const std::vector<TypeLabel>& leaf_labels = pl.labels;

  views::AstTokenSequence ast = views::linearize_ast(tree, sample_id);
  std::vector<TypeLabel> ast_labels = pick(leaf_labels, ast.leaf_ordinals);
  views::CfgTokenSequence cfg = views::cfg_view(tree);
  std::vector<TypeLabel> cfg_labels = pick(leaf_labels, cfg.leaf_ordinals);

  out.push_back({sample_id, ViewKind::PL, pl.tokens, pl.labels, std::nullopt});
  out.push_back({sample_id, ViewKind::AST, std::move(ast.tokens), std::move(ast_labels), std::nullopt});
  out.push_back({sample_id, ViewKind::CFG, std::move(cfg.tokens), std::move(cfg_labels), std::nullopt});

  const auto variants = transform::generate_variants(tree, pt_seed, 1);
  typing::TypedTokenSequence pt = typing::infer_types(variants.front().tree);
  out.push_back({sample_id, ViewKind::PT, std::move(pt.tokens), std::move(pt.labels), pt_seed});
  return out;
}

ViewRecord encode_view(const ViewRecord& record, const typing::BpeModel& bpe) {
  typing::TypedSubtokens sub = typing::encode_with_types({record.tokens, record.labels}, bpe);
  return {record.sample_id, record.view, std::move(sub.subtokens), std::move(sub.labels), record.seed};
}

}  // namespace mvp::pairs
