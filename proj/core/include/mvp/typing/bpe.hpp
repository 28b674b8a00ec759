#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mvp/typing/types.hpp"

namespace mvp::typing {

inline constexpr std::string_view kEndOfWord = "</w>";

/// Special tokens and their fixed ids.
enum SpecialId : std::int32_t { kPad = 0, kCls = 1, kSep = 2, kMask = 3, kUnk = 4, kBlk = 5 };
inline constexpr std::string_view kSpecialTokens[] = {"<PAD>", "<CLS>", "<SEP>", "<MASK>", "<UNK>", "<blk>"};
inline constexpr std::size_t kSpecialCount = std::size(kSpecialTokens);

bool is_special_token(std::string_view token);

/// Greedy most-frequent-pair byte-pair encoding over UTF-8 code points.
/// The last symbol of every word carries the end-of-word marker.
class BpeModel {
 public:
  using Merge = std::pair<std::string, std::string>;

  BpeModel() { rebuild(); }
  BpeModel(std::vector<std::string> alphabet, std::vector<Merge> merges);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<Merge>& merges() const { return merges_; }

  /// Subtokens of one word. Special tokens come back whole.
  std::vector<std::string> encode(std::string_view token) const;
  std::vector<std::string> encode(const std::vector<std::string>& tokens) const;

  std::int32_t id(std::string_view symbol) const;  // kUnk when absent
  const std::string& symbol(std::int32_t id) const;
  std::size_t vocab_size() const { return symbols_.size(); }
  std::vector<std::int32_t> ids(const std::vector<std::string>& subtokens) const;

  void save(const std::filesystem::path& path) const;
  static BpeModel load(const std::filesystem::path& path);
  std::string serialize() const;
  static BpeModel deserialize(std::string_view text);

 private:
  void rebuild();

  std::vector<std::string> alphabet_;
  std::vector<Merge> merges_;
  std::map<Merge, std::size_t> rank_;
  std::vector<std::string> symbols_;
  std::map<std::string, std::int32_t, std::less<>> index_;
};

/// Learns up to `merges` merges; stops early once no pair is left. Ties on
/// frequency go to the lexicographically smallest pair.
BpeModel train_bpe(const std::vector<std::vector<std::string>>& corpus, std::size_t merges);

/// Joins subtokens back into words at end-of-word markers.
std::vector<std::string> detokenize(const std::vector<std::string>& subtokens);

struct TypedSubtokens {
  std::vector<std::string> subtokens;
  std::vector<TypeLabel> labels;
};

/// Splits every token and copies the token's label onto each of its subtokens.
TypedSubtokens encode_with_types(const TypedTokenSequence& seq, const BpeModel& bpe);

/// UTF-8 code points of a word, the last one suffixed with the end-of-word marker.
std::vector<std::string> word_symbols(std::string_view word);

}  // namespace mvp::typing
