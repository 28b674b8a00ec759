#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mvp/model/tape.hpp"
#include "mvp/pairs/pairs.hpp"
#include "mvp/typing/types.hpp"

namespace mvp::model {

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t type_classes = typing::kTypeClassCount;
  std::size_t d = 32;
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t ff = 64;
  std::size_t max_positions = 1 + pairs::kMaxNlLength + 1 + pairs::kMaxSecondLength;
  double lambda = 0.0;  // L2 coefficient
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the first inconsistent field.
  void validate() const;
  std::map<std::string, std::string> to_map() const;
  static EncoderConfig from_map(const std::map<std::string, std::string>& values);
};

/// Every trainable tensor, in a fixed declaration order that also defines
/// the checkpoint layout.
class ModelState {
 public:
  explicit ModelState(const EncoderConfig& config);

  const EncoderConfig& config() const { return config_; }
  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;

  std::size_t scalar_count() const;
  double squared_norm() const;
  void zero_grad();

 private:
  Parameter& add(std::string name, Eigen::Index rows, Eigen::Index cols);

  EncoderConfig config_;
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> index_;
};

/// Hidden states (length x d) of one input. <PAD> keys are masked out of
/// attention; every layer is pre-norm and a final LayerNorm closes the stack.
Tape::Var encode(Tape& tape, ModelState& state, const std::vector<std::int32_t>& ids);

/// Projection head: W2 tanh(W1 h + b1) + b2, applied row-wise.
Tape::Var project(Tape& tape, ModelState& state, Tape::Var h);

Matrix encode_values(ModelState& state, const std::vector<std::int32_t>& ids);
/// Projected <CLS> vector of one input.
Eigen::VectorXd embed(ModelState& state, const std::vector<std::int32_t>& ids);

/// Which terms of the objective to include.
struct LossTerms {
  bool mvcl = true;
  bool fgti = true;
  bool mmlm = true;
  bool l2 = true;
};

struct LossBreakdown {
  double mvcl = 0.0;
  double fgti = 0.0;
  double mmlm = 0.0;
  double l2 = 0.0;  // lambda * ||theta||^2
  double total = 0.0;
  std::size_t type_targets = 0;    // |Z|
  std::size_t masked_targets = 0;  // |M|
  std::size_t warnings = 0;        // terms skipped for lack of targets
};

/// The composite objective on one batch. Contrastive vectors come from the
/// clean anchors and positives; the type and masked-token heads read the
/// masked anchors. `masked` must be apply_mlm_mask(pad(batch.anchors)).
/// With `backward`, gradients are accumulated into the parameters.
LossBreakdown batch_loss(ModelState& state, const pairs::TrainingBatch& batch, const pairs::MaskedBatch& masked,
                         const LossTerms& terms = {}, bool backward = false);

}  // namespace mvp::model
