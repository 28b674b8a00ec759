#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvp/frontend/syntax_tree.hpp"
#include "mvp/typing/bpe.hpp"
#include "mvp/typing/types.hpp"

namespace mvp::pairs {

enum class ViewKind : std::uint8_t { NL, PL, AST, CFG, PT };

inline constexpr ViewKind kAllViews[] = {ViewKind::NL, ViewKind::PL, ViewKind::AST, ViewKind::CFG, ViewKind::PT};

std::string_view view_name(ViewKind view);
std::optional<ViewKind> parse_view(std::string_view name);

/// One view of one sample. Tokens are words before BPE and subtokens after
/// encode_view; labels run parallel to tokens.
struct ViewRecord {
  std::string sample_id;
  ViewKind view = ViewKind::PL;
  std::vector<std::string> tokens;
  std::vector<typing::TypeLabel> labels;
  std::optional<std::uint64_t> seed;  // PT only: the variant seed

  bool operator==(const ViewRecord&) const = default;
};

/// PL, AST, CFG and one PT view of a program, plus NL when a description is
/// given. Identifier tokens carry inferred types, everything else O.
std::vector<ViewRecord> extract_views(const frontend::SyntaxTree& tree, const std::string& sample_id,
                                      const std::optional<std::string>& nl, std::uint64_t pt_seed);

/// Whitespace-split words of a description.
std::vector<std::string> nl_words(std::string_view text);

/// The record with every token replaced by its BPE subtokens.
ViewRecord encode_view(const ViewRecord& record, const typing::BpeModel& bpe);

}  // namespace mvp::pairs
