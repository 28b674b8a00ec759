#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mvp/model/train.hpp"
#include "mvp/pipeline/config.hpp"
#include "mvp/pipeline/corpus.hpp"
#include "mvp/pipeline/retrieval.hpp"
#include "mvp/typing/bpe.hpp"

namespace mvp::pipeline {

struct PretrainOptions {
  model::EncoderConfig model;  // vocab_size is taken from the trained BPE model
  model::TrainConfig train;
  std::size_t bpe_merges = 1000;
  std::optional<pairs::ViewKind> drop_view;  // leave one view out of pair generation
  std::uint64_t pt_seed = 0;
};

/// Reads model.*, train.*, loss.lambda, mask.rate, bpe.merges and pt.seed;
/// absent keys keep their defaults. Throws std::invalid_argument on bad values.
PretrainOptions options_from_config(const Config& config, std::uint64_t seed);

struct PretrainResult {
  typing::BpeModel bpe;
  model::ModelState state;
  model::TrainLog log;
};

/// Word-level views of every sample, PT seeded by derive_seed(pt_seed, index).
std::vector<std::vector<pairs::ViewRecord>> sample_views(const std::vector<Sample>& samples, std::uint64_t pt_seed);

/// Positive pairs for each epoch. Epoch 0 uses the given PT views; later
/// epochs draw a fresh variant per sample from an epoch-specific seed.
model::PairSource make_pair_source(const std::vector<Sample>& samples,
                                   const std::vector<std::vector<pairs::ViewRecord>>& views,
                                   const typing::BpeModel& bpe, std::optional<pairs::ViewKind> drop,
                                   std::uint64_t pt_seed);

/// BPE over all training views, then training from a fresh model.
PretrainResult pretrain(const std::vector<Sample>& samples, const PretrainOptions& options);

/// NL -> PL retrieval: each described sample's NL queries a pool made of the
/// PL views of all described samples.
RetrievalResult evaluate_nl_to_code(model::ModelState& state, const typing::BpeModel& bpe,
                                    const std::vector<Sample>& samples);

}  // namespace mvp::pipeline
