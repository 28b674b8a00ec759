#include "mvp/model/train.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "mvp/util/random.hpp"
#include "mvp/util/error.hpp"

namespace mvp::model {

namespace {

constexpr std::string_view kCheckpointMagic = "mvp-checkpoint 1";

void write_le(std::ostream& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  char bytes[8];
  for (char& b : bytes) {
    b = static_cast<char>(bits & 0xFFU);
    bits >>= 8;
  }
  out.write(bytes, 8);
}

double read_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw std::runtime_error("checkpoint blob is truncated");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

void check_finite(const LossBreakdown& l, std::size_t step) {
  const std::pair<const char*, double> terms[] = {
      {"mvcl", l.mvcl}, {"fgti", l.fgti}, {"mmlm", l.mmlm}, {"l2", l.l2}};
  for (const auto& [name, value] : terms) {
    if (!std::isfinite(value)) {
      throw TrainingError("non-finite " + std::string(name) + " loss at step " + std::to_string(step));
    }
  }
}

}  // namespace

void Optimizer::step(ModelState& state) {
  auto& params = state.params();
  ++t_;
  if (config_.kind == OptimizerKind::Sgd) {
    for (Parameter& p : params) p.value -= config_.learning_rate * p.grad;
    return;
  }
  if (m_.empty()) {
    for (const Parameter& p : params) {
      m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    }
  }
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.grad;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= config_.learning_rate * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
}

double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

GradCheckResult gradient_check(ModelState& state, const pairs::TrainingBatch& batch, const pairs::MaskedBatch& masked,
                               const LossTerms& terms, std::size_t count, std::uint64_t seed, double step) {
  state.zero_grad();
  batch_loss(state, batch, masked, terms, true);
  const std::size_t total = state.scalar_count();
  Rng rng(seed);
  GradCheckResult result;
  for (std::size_t s = 0; s < count; ++s) {
    std::size_t flat = rng.uniform(total);
    std::size_t which = 0;
    while (flat >= static_cast<std::size_t>(state.params()[which].value.size())) {
      flat -= static_cast<std::size_t>(state.params()[which].value.size());
      ++which;
    }
    Parameter& p = state.params()[which];
    const auto idx = static_cast<Eigen::Index>(flat);
    double& x = p.value.data()[idx];
    const double saved = x;
    x = saved + step;
    const double up = batch_loss(state, batch, masked, terms).total;
    x = saved - step;
    const double down = batch_loss(state, batch, masked, terms).total;
    x = saved;
    GradSample g{p.name, idx, p.grad.data()[idx], (up - down) / (2.0 * step), 0.0};
    g.rel_error = relative_error(g.analytic, g.numeric);
    result.max_rel_error = std::max(result.max_rel_error, g.rel_error);
    result.samples.push_back(std::move(g));
  }
  return result;
}

TrainLog train(ModelState& state, const PairSource& source, const TrainConfig& config,
               const std::function<void(std::size_t, const LossBreakdown&)>& on_step) {
  Optimizer opt(config.optimizer);
  TrainLog log;
  std::vector<pairs::TrainingBatch> batches;
  std::size_t next = 0;
  for (std::size_t step = 0; step < config.steps; ++step) {
    if (next == batches.size()) {
      if (log.epochs > 0 && !config.checkpoint_dir.empty()) {
        save_checkpoint(config.checkpoint_dir / ("epoch-" + std::to_string(log.epochs) + ".ckpt"), state,
                        config.corpus_hash, step);
      }
      batches = pairs::make_batches(source(log.epochs), config.batch_n, derive_seed(config.seed, log.epochs));
      ++log.epochs;
      next = 0;
      if (batches.empty()) throw TrainingError("corpus too small for one batch of " + std::to_string(config.batch_n));
    }
    const pairs::TrainingBatch& batch = batches[next++];
    const pairs::MaskedBatch masked =
        pairs::apply_mlm_mask(pairs::pad(batch.anchors), config.mask_rate, derive_seed(config.seed ^ 0x6d61736bULL, step));
    state.zero_grad();
    const LossBreakdown loss = batch_loss(state, batch, masked, config.terms, true);
    check_finite(loss, step);
    opt.step(state);
    log.steps.push_back(loss);
    if (on_step) on_step(step, loss);
  }
  if (!config.checkpoint_dir.empty()) {
    save_checkpoint(config.checkpoint_dir / ("epoch-" + std::to_string(log.epochs) + ".ckpt"), state,
                    config.corpus_hash, config.steps);
  }
  return log;
}

void save_checkpoint(const std::filesystem::path& path, const ModelState& state, const std::string& corpus_hash,
                     std::size_t step) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << kCheckpointMagic << "\n";
  for (const auto& [k, v] : state.config().to_map()) out << "config " << k << " " << v << "\n";
  out << "corpus " << (corpus_hash.empty() ? "-" : corpus_hash) << "\n";
  out << "step " << step << "\n";
  for (const Parameter& p : state.params()) out << "tensor " << p.name << " " << p.value.rows() << " " << p.value.cols() << "\n";
  out << "blob\n";
  for (const Parameter& p : state.params()) {
    // Row-major so the blob reads naturally regardless of Eigen's storage.
    for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.value.cols(); ++c) write_le(out, p.value(r, c));
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic) throw std::runtime_error(path.string() + " is not a checkpoint");
  std::map<std::string, std::string> config;
  std::string hash;
  std::size_t step = 0;
  std::vector<std::tuple<std::string, Eigen::Index, Eigen::Index>> shapes;
  while (std::getline(in, line) && line != "blob") {
    std::istringstream f(line);
    std::string tag;
    f >> tag;
    if (tag == "config") {
      std::string k, v;
      f >> k >> v;
      config[k] = v;
    } else if (tag == "corpus") {
      f >> hash;
      if (hash == "-") hash.clear();
    } else if (tag == "step") {
      f >> step;
    } else if (tag == "tensor") {
      std::string name;
      Eigen::Index r = 0, c = 0;
      f >> name >> r >> c;
      shapes.emplace_back(name, r, c);
    }
  }
  Checkpoint ck{ModelState(EncoderConfig::from_map(config)), hash, step};
  if (shapes.size() != ck.state.params().size()) throw std::runtime_error("checkpoint tensor count does not match config");
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    Parameter& p = ck.state.params()[i];
    const auto& [name, rows, cols] = shapes[i];
    if (name != p.name || rows != p.value.rows() || cols != p.value.cols()) {
      throw std::runtime_error("checkpoint tensor " + name + " does not match the model layout");
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) p.value(r, c) = read_le(in);
    }
  }
  return ck;
}

}  // namespace mvp::model
