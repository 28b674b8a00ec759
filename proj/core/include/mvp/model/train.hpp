#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvp/model/encoder.hpp"

namespace mvp::model {

enum class OptimizerKind : std::uint8_t { Sgd, Adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Fixed-step gradient descent or Adam's per-parameter scaling.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}
  void step(ModelState& state);
  std::size_t steps() const { return t_; }

 private:
  OptimizerConfig config_;
  std::size_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

struct GradSample {
  std::string param;
  Eigen::Index index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckResult {
  std::vector<GradSample> samples;
  double max_rel_error = 0.0;
};

/// Relative error |a - n| / max(|a|, |n|, floor). The floor keeps gradients
/// that are zero up to rounding from dominating the comparison.
inline constexpr double kGradCheckFloor = 1e-6;
double relative_error(double analytic, double numeric, double floor = kGradCheckFloor);

/// Compares backprop against central differences on `count` scalar
/// parameters drawn uniformly (seeded) from the whole model.
GradCheckResult gradient_check(ModelState& state, const pairs::TrainingBatch& batch, const pairs::MaskedBatch& masked,
                               const LossTerms& terms, std::size_t count, std::uint64_t seed, double step = 1e-4);

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  std::size_t steps = 300;
  std::size_t batch_n = 8;
  double mask_rate = pairs::kDefaultMaskRate;
  OptimizerConfig optimizer;
  LossTerms terms;
  std::uint64_t seed = 0;
  std::filesystem::path checkpoint_dir;  // empty: no checkpoints
  std::string corpus_hash;
};

struct TrainLog {
  std::vector<LossBreakdown> steps;
  std::size_t epochs = 0;
};

/// Positive pairs for one epoch; called with 0, 1, ... as epochs begin.
using PairSource = std::function<std::vector<pairs::PositivePair>(std::size_t epoch)>;

/// Runs `config.steps` optimizer steps over seeded batches, starting a new
/// epoch whenever the previous one runs out of batches. A checkpoint is
/// written after each completed epoch. Throws TrainingError on a non-finite
/// loss, naming the offending term.
TrainLog train(ModelState& state, const PairSource& source, const TrainConfig& config,
               const std::function<void(std::size_t, const LossBreakdown&)>& on_step = {});

struct Checkpoint {
  ModelState state;
  std::string corpus_hash;
  std::size_t step = 0;
};

/// Text header (format version, config, corpus hash, step, tensor shapes)
/// followed by the parameters as little-endian 64-bit floats.
void save_checkpoint(const std::filesystem::path& path, const ModelState& state, const std::string& corpus_hash,
                     std::size_t step);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mvp::model
