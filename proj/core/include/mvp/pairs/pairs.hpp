#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvp/pairs/views.hpp"
#include "mvp/typing/bpe.hpp"

namespace mvp::pairs {

inline constexpr std::size_t kMaxSingleLength = 512;  // including <CLS>
inline constexpr std::size_t kMaxNlLength = 96;
inline constexpr std::size_t kMaxSecondLength = 416;

enum class Form : std::uint8_t { Single, Dual };

/// Model input: ids start with <CLS>; the dual form holds one <SEP>.
/// Labels run parallel to ids, O on specials and NL.
struct InputSequence {
  std::string sample_id;
  Form form = Form::Single;
  ViewKind first = ViewKind::PL;
  std::optional<ViewKind> second;  // dual form only
  std::vector<std::int32_t> ids;
  std::vector<typing::TypeLabel> labels;

  bool operator==(const InputSequence&) const = default;
};

/// [<CLS>] + subtokens, cut to kMaxSingleLength. `record` holds subtokens.
InputSequence assemble_single(const ViewRecord& record, const typing::BpeModel& bpe);

/// [<CLS>] + NL (at most kMaxNlLength) + [<SEP>] + second view (at most kMaxSecondLength).
InputSequence assemble_dual(const ViewRecord& nl, const ViewRecord& record, const typing::BpeModel& bpe);

/// One of the positive-pair combinations. Dual combinations pair NL+PL
/// with NL+`b`; single ones pair view `a` with view `b`.
struct PairCombo {
  bool dual = false;
  ViewKind a = ViewKind::NL;
  ViewKind b = ViewKind::PL;

  std::string name() const;
  bool uses(ViewKind v) const;
  bool operator==(const PairCombo&) const = default;
};

/// The eight combinations in fixed order: five single-view, three dual-view.
const std::vector<PairCombo>& all_combos();

struct PositivePair {
  std::size_t combo = 0;  // index into all_combos()
  InputSequence anchor;
  InputSequence positive;
};

/// All combinations available to one sample. Paired samples (with NL) get
/// eight; unpaired ones the three NL-free single-view combinations.
/// Combinations touching `drop` are left out. `views` hold subtokens.
std::vector<PositivePair> make_positive_pairs(const std::vector<ViewRecord>& views, bool paired,
                                              const typing::BpeModel& bpe,
                                              std::optional<ViewKind> drop = std::nullopt);

/// n aligned anchor/positive inputs of one combination with distinct samples.
struct TrainingBatch {
  std::size_t combo = 0;
  std::vector<InputSequence> anchors;
  std::vector<InputSequence> positives;

  std::size_t size() const { return anchors.size(); }
};

/// Seeded shuffle into view-homogeneous batches of `n` distinct samples.
/// Leftover pairs that cannot fill a batch are dropped.
std::vector<TrainingBatch> make_batches(std::vector<PositivePair> pairs, std::size_t n, std::uint64_t seed);

enum class Direction : std::uint8_t { AnchorToPositive, PositiveToAnchor };

/// Negatives of query i: the other n-1 inputs of the query's own side and
/// the other n-1 inputs of the opposite side, as batch indices.
struct NegativeSet {
  std::vector<std::size_t> intra;
  std::vector<std::size_t> inter;
};

NegativeSet negatives(const TrainingBatch& batch, std::size_t i, Direction direction = Direction::AnchorToPositive);

/// Row-major ids padded with <PAD> to the longest row.
struct TokenMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> ids;
  std::vector<typing::TypeLabel> labels;

  std::int32_t at(std::size_t r, std::size_t c) const { return ids[r * cols + c]; }
};

TokenMatrix pad(const std::vector<InputSequence>& inputs);

inline constexpr double kDefaultMaskRate = 0.15;

struct MaskedBatch {
  TokenMatrix tokens;                     // with <MASK> at selected positions
  std::vector<std::size_t> positions;     // flat indices into tokens.ids
  std::vector<std::int32_t> originals;    // ids replaced at `positions`
};

/// Every non-special position is replaced by <MASK> independently with
/// probability `rate`.
MaskedBatch apply_mlm_mask(const TokenMatrix& tokens, double rate, std::uint64_t seed);

}  // namespace mvp::pairs
