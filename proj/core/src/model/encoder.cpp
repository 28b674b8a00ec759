#include "mvp/model/encoder.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "mvp/typing/bpe.hpp"
#include "mvp/util/random.hpp"

namespace mvp::model {

using Var = Tape::Var;

namespace {

std::size_t to_size(const std::map<std::string, std::string>& m, const std::string& key, std::size_t fallback) {
  const auto it = m.find(key);
  return it == m.end() ? fallback : std::stoul(it->second);
}

std::string shortest(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string layer_name(std::size_t l, const char* suffix) { return "layer" + std::to_string(l) + "." + suffix; }

}  // namespace

void EncoderConfig::validate() const {
  if (vocab_size <= typing::kSpecialCount) throw std::invalid_argument("model.vocab must exceed the special tokens");
  if (type_classes == 0) throw std::invalid_argument("model.types must be positive");
  if (d == 0 || heads == 0 || d % heads != 0) throw std::invalid_argument("model.d must be a positive multiple of model.heads");
  if (layers == 0 || ff == 0) throw std::invalid_argument("model.layers and model.ff must be positive");
  if (max_positions < 2) throw std::invalid_argument("model.max_positions must be at least 2");
  if (!(lambda >= 0.0)) throw std::invalid_argument("loss.lambda must be non-negative");
}

std::map<std::string, std::string> EncoderConfig::to_map() const {
  return {{"model.vocab", std::to_string(vocab_size)},
          {"model.types", std::to_string(type_classes)},
          {"model.d", std::to_string(d)},
          {"model.layers", std::to_string(layers)},
          {"model.heads", std::to_string(heads)},
          {"model.ff", std::to_string(ff)},
          {"model.max_positions", std::to_string(max_positions)},
          {"loss.lambda", shortest(lambda)},
          {"model.seed", std::to_string(seed)}};
}

EncoderConfig EncoderConfig::from_map(const std::map<std::string, std::string>& m) {
  EncoderConfig c;
  c.vocab_size = to_size(m, "model.vocab", c.vocab_size);
  c.type_classes = to_size(m, "model.types", c.type_classes);
  c.d = to_size(m, "model.d", c.d);
  c.layers = to_size(m, "model.layers", c.layers);
  c.heads = to_size(m, "model.heads", c.heads);
  c.ff = to_size(m, "model.ff", c.ff);
  c.max_positions = to_size(m, "model.max_positions", c.max_positions);
  if (const auto it = m.find("loss.lambda"); it != m.end()) c.lambda = std::stod(it->second);
  if (const auto it = m.find("model.seed"); it != m.end()) c.seed = std::stoull(it->second);
  return c;
}

ModelState::ModelState(const EncoderConfig& config) : config_(config) {
  config_.validate();
  const auto d = static_cast<Eigen::Index>(config_.d);
  const auto ff = static_cast<Eigen::Index>(config_.ff);
  Rng rng(config_.seed);
  auto normal = [&](Parameter& p, double stddev) {
    for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = stddev * rng.normal();
  };
  auto ones = [](Parameter& p) { p.value.setOnes(); };
  const double wd = 1.0 / std::sqrt(static_cast<double>(d));

  normal(add("embed.tokens", static_cast<Eigen::Index>(config_.vocab_size), d), 0.5);
  normal(add("embed.positions", static_cast<Eigen::Index>(config_.max_positions), d), 0.1);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    ones(add(layer_name(l, "ln1.gamma"), 1, d));
    add(layer_name(l, "ln1.beta"), 1, d);
    for (const char* w : {"attn.wq", "attn.wk", "attn.wv", "attn.wo"}) {
      normal(add(layer_name(l, w), d, d), wd);
      add(layer_name(l, w) + ".b", 1, d);
    }
    ones(add(layer_name(l, "ln2.gamma"), 1, d));
    add(layer_name(l, "ln2.beta"), 1, d);
    normal(add(layer_name(l, "ff.w1"), d, ff), wd);
    add(layer_name(l, "ff.b1"), 1, ff);
    normal(add(layer_name(l, "ff.w2"), ff, d), 1.0 / std::sqrt(static_cast<double>(ff)));
    add(layer_name(l, "ff.b2"), 1, d);
  }
  ones(add("final.gamma", 1, d));
  add("final.beta", 1, d);
  normal(add("proj.w1", d, d), wd);
  add("proj.b1", 1, d);
  normal(add("proj.w2", d, d), wd);
  add("proj.b2", 1, d);
  normal(add("types.w", d, static_cast<Eigen::Index>(config_.type_classes)), wd);
  add("types.b", 1, static_cast<Eigen::Index>(config_.type_classes));
  normal(add("tokens.w", d, static_cast<Eigen::Index>(config_.vocab_size)), wd);
  add("tokens.b", 1, static_cast<Eigen::Index>(config_.vocab_size));
}

Parameter& ModelState::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  index_[name] = params_.size();
  params_.push_back({std::move(name), Matrix::Zero(rows, cols), Matrix::Zero(rows, cols)});
  return params_.back();
}

Parameter& ModelState::get(const std::string& name) { return params_.at(index_.at(name)); }
const Parameter& ModelState::get(const std::string& name) const { return params_.at(index_.at(name)); }

std::size_t ModelState::scalar_count() const {
  std::size_t n = 0;
  for (const Parameter& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

double ModelState::squared_norm() const {
  double s = 0.0;
  for (const Parameter& p : params_) s += p.value.squaredNorm();
  return s;
}

void ModelState::zero_grad() {
  for (Parameter& p : params_) p.grad.setZero(p.value.rows(), p.value.cols());
}

Var encode(Tape& tape, ModelState& state, const std::vector<std::int32_t>& ids) {
  const EncoderConfig& c = state.config();
  if (ids.empty()) throw std::invalid_argument("cannot encode an empty input");
  if (ids.size() > c.max_positions) throw std::invalid_argument("input longer than model.max_positions");
  for (std::int32_t id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= c.vocab_size) {
      throw std::out_of_range("token id " + std::to_string(id) + " outside the vocabulary");
    }
  }
  std::vector<std::int32_t> positions(ids.size());
  std::vector<bool> pad_keys(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    positions[i] = static_cast<std::int32_t>(i);
    pad_keys[i] = ids[i] == typing::kPad;
  }
  auto P = [&](const std::string& name) { return tape.param(state.get(name)); };

  Var x = tape.add(tape.gather_rows(P("embed.tokens"), ids), tape.gather_rows(P("embed.positions"), positions));
  const auto dh = static_cast<Eigen::Index>(c.d / c.heads);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  for (std::size_t l = 0; l < c.layers; ++l) {
    auto L = [&](const char* s) { return P(layer_name(l, s)); };
    auto affine = [&](Var in, const char* w) {
      return tape.add_row(tape.matmul(in, L(w)), P(layer_name(l, w) + ".b"));
    };
    const Var h = tape.layer_norm(x, L("ln1.gamma"), L("ln1.beta"));
    const Var q = affine(h, "attn.wq");
    const Var k = affine(h, "attn.wk");
    const Var v = affine(h, "attn.wv");
    std::vector<Var> heads;
    for (std::size_t hd = 0; hd < c.heads; ++hd) {
      const auto start = static_cast<Eigen::Index>(hd) * dh;
      const Var qh = tape.slice_cols(q, start, dh);
      const Var kh = tape.slice_cols(k, start, dh);
      const Var vh = tape.slice_cols(v, start, dh);
      const Var att = tape.softmax_rows(tape.scale(tape.matmul_nt(qh, kh), inv_sqrt), pad_keys);
      heads.push_back(tape.matmul(att, vh));
    }
    x = tape.add(x, affine(tape.concat_cols(heads), "attn.wo"));
    const Var h2 = tape.layer_norm(x, L("ln2.gamma"), L("ln2.beta"));
    const Var f = tape.gelu(tape.add_row(tape.matmul(h2, L("ff.w1")), L("ff.b1")));
    x = tape.add(x, tape.add_row(tape.matmul(f, L("ff.w2")), L("ff.b2")));
  }
  return tape.layer_norm(x, P("final.gamma"), P("final.beta"));
}

Var project(Tape& tape, ModelState& state, Var h) {
  auto P = [&](const char* name) { return tape.param(state.get(name)); };
  const Var hidden = tape.tanh(tape.add_row(tape.matmul(h, P("proj.w1")), P("proj.b1")));
  return tape.add_row(tape.matmul(hidden, P("proj.w2")), P("proj.b2"));
}

Matrix encode_values(ModelState& state, const std::vector<std::int32_t>& ids) {
  Tape tape;
  return tape.value(encode(tape, state, ids));
}

Eigen::VectorXd embed(ModelState& state, const std::vector<std::int32_t>& ids) {
  Tape tape;
  const Var h = encode(tape, state, ids);
  const Var cls = tape.gather_rows(h, {0});
  return tape.value(project(tape, state, cls)).row(0).transpose();
}

LossBreakdown batch_loss(ModelState& state, const pairs::TrainingBatch& batch, const pairs::MaskedBatch& masked,
                         const LossTerms& terms, bool backward) {
  Tape tape;
  LossBreakdown out;
  std::vector<Var> parts;
  const std::size_t n = batch.size();

  if (terms.mvcl) {
    std::vector<Var> cls_a;
    std::vector<Var> cls_b;
    for (std::size_t i = 0; i < n; ++i) {
      cls_a.push_back(tape.gather_rows(encode(tape, state, batch.anchors[i].ids), {0}));
      cls_b.push_back(tape.gather_rows(encode(tape, state, batch.positives[i].ids), {0}));
    }
    const Var va = project(tape, state, tape.stack_rows(cls_a));
    const Var vb = project(tape, state, tape.stack_rows(cls_b));
    const Var l = tape.contrastive(va, vb);
    out.mvcl = tape.scalar(l);
    parts.push_back(l);
  }

  if (terms.fgti || terms.mmlm) {
    const pairs::TokenMatrix& tm = masked.tokens;
    std::vector<Var> type_rows;
    std::vector<std::int32_t> type_targets;
    std::vector<Var> token_rows;
    std::vector<std::int32_t> token_targets;
    std::size_t next_mask = 0;
    for (std::size_t r = 0; r < tm.rows; ++r) {
      const std::size_t len = batch.anchors[r].ids.size();
      const std::vector<std::int32_t> ids(tm.ids.begin() + static_cast<std::ptrdiff_t>(r * tm.cols),
                                          tm.ids.begin() + static_cast<std::ptrdiff_t>(r * tm.cols + len));
      std::vector<std::int32_t> typed_pos;
      for (std::size_t col = 0; col < len; ++col) {
        const typing::TypeLabel label = tm.labels[r * tm.cols + col];
        if (label != typing::TypeLabel::O) {
          typed_pos.push_back(static_cast<std::int32_t>(col));
          type_targets.push_back(static_cast<std::int32_t>(label));
        }
      }
      std::vector<std::int32_t> masked_pos;
      while (next_mask < masked.positions.size() && masked.positions[next_mask] < (r + 1) * tm.cols) {
        masked_pos.push_back(static_cast<std::int32_t>(masked.positions[next_mask] - r * tm.cols));
        token_targets.push_back(masked.originals[next_mask]);
        ++next_mask;
      }
      if ((!terms.fgti || typed_pos.empty()) && (!terms.mmlm || masked_pos.empty())) continue;
      const Var h = encode(tape, state, ids);
      if (terms.fgti && !typed_pos.empty()) type_rows.push_back(tape.gather_rows(h, typed_pos));
      if (terms.mmlm && !masked_pos.empty()) token_rows.push_back(tape.gather_rows(h, masked_pos));
    }
    auto head_loss = [&](const std::vector<Var>& rows, const std::vector<std::int32_t>& targets, const char* w,
                         const char* b, double& value) {
      if (targets.empty()) {
        ++out.warnings;
        return;
      }
      // All target rows of the batch share one softmax head and one mean.
      const Var stacked = rows.size() == 1 ? rows.front() : tape.stack_rows(rows);
      const Var logits = tape.add_row(tape.matmul(stacked, tape.param(state.get(w))), tape.param(state.get(b)));
      const Var l = tape.cross_entropy(logits, targets);
      value = tape.scalar(l);
      parts.push_back(l);
    };
    if (terms.fgti) {
      out.type_targets = type_targets.size();
      head_loss(type_rows, type_targets, "types.w", "types.b", out.fgti);
    }
    if (terms.mmlm) {
      out.masked_targets = token_targets.size();
      head_loss(token_rows, token_targets, "tokens.w", "tokens.b", out.mmlm);
    }
  }

  if (terms.l2 && state.config().lambda > 0.0) {
    std::vector<Var> squares;
    for (Parameter& p : state.params()) squares.push_back(tape.sum_squares(tape.param(p)));
    const Var l = tape.scale(tape.sum(squares), state.config().lambda);
    out.l2 = tape.scalar(l);
    parts.push_back(l);
  }

  if (parts.empty()) return out;
  const Var total = tape.sum(parts);
  out.total = tape.scalar(total);
  if (backward) tape.backward(total);
  return out;
}

}  // namespace mvp::model
