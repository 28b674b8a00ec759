#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "mvp/model/encoder.hpp"
#include "mvp/model/tape.hpp"
#include "mvp/model/train.hpp"
#include "mvp/pipeline/pretrain.hpp"
#include "mvp/pipeline/synthetic.hpp"
#include "mvp/util/random.hpp"

using namespace mvp;
using model::Matrix;
using typing::TypeLabel;

namespace {

model::EncoderConfig tiny_config(std::size_t vocab = 40) {
  model::EncoderConfig c;
  c.vocab_size = vocab;
  c.d = 8;
  c.layers = 1;
  c.heads = 2;
  c.ff = 16;
  c.max_positions = 64;
  c.seed = 3;
  return c;
}

pairs::InputSequence input(std::vector<std::int32_t> ids, std::vector<TypeLabel> labels, const std::string& id) {
  pairs::InputSequence s;
  s.sample_id = id;
  s.ids = std::move(ids);
  s.labels = std::move(labels);
  return s;
}

pairs::TrainingBatch random_batch(std::size_t n, std::size_t vocab, std::uint64_t seed, TypeLabel label = TypeLabel::Int) {
  Rng rng(seed);
  pairs::TrainingBatch b;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::int32_t> a{typing::kCls};
    std::vector<TypeLabel> al{TypeLabel::O};
    std::vector<std::int32_t> p{typing::kCls};
    std::vector<TypeLabel> pl{TypeLabel::O};
    const auto la = 3 + rng.uniform(5);
    for (std::uint64_t k = 0; k < la; ++k) {
      a.push_back(static_cast<std::int32_t>(typing::kSpecialCount + rng.uniform(vocab - typing::kSpecialCount)));
      al.push_back(k % 2 ? label : TypeLabel::O);
    }
    const auto lp = 2 + rng.uniform(5);
    for (std::uint64_t k = 0; k < lp; ++k) {
      p.push_back(static_cast<std::int32_t>(typing::kSpecialCount + rng.uniform(vocab - typing::kSpecialCount)));
      pl.push_back(TypeLabel::O);
    }
    b.anchors.push_back(input(a, al, "s" + std::to_string(i)));
    b.positives.push_back(input(p, pl, "s" + std::to_string(i)));
  }
  return b;
}

// Naive double loop over every dot product, both directions, averaged over anchors.
double brute_force_mvcl(const Matrix& va, const Matrix& vb) {
  const auto n = va.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int dir = 0; dir < 2; ++dir) {
      const Matrix& own = dir == 0 ? va : vb;
      const Matrix& other = dir == 0 ? vb : va;
      const double pos = std::exp(own.row(i).dot(other.row(i)));
      double denom = pos;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        denom += std::exp(own.row(i).dot(own.row(j)));
        denom += std::exp(own.row(i).dot(other.row(j)));
      }
      total += -std::log(pos / denom);
    }
  }
  return total / static_cast<double>(n);
}

double loss_of(model::ModelState& s, const pairs::TrainingBatch& b, const pairs::MaskedBatch& m, model::LossTerms t) {
  return model::batch_loss(s, b, m, t, false).total;
}

// Central differences against backprop on a few entries of one tensor.
double max_head_error(model::ModelState& state, const pairs::TrainingBatch& b, const pairs::MaskedBatch& m,
                      model::LossTerms terms, const std::string& name) {
  state.zero_grad();
  model::batch_loss(state, b, m, terms, true);
  Matrix& w = state.get(name).value;
  const Matrix grad = state.get(name).grad;
  double worst = 0.0;
  const double h = 1e-5;
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(w.size(), 24); ++k) {
    const double keep = w(k);
    w(k) = keep + h;
    const double up = loss_of(state, b, m, terms);
    w(k) = keep - h;
    const double down = loss_of(state, b, m, terms);
    w(k) = keep;
    const double numeric = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(grad(k) - numeric) / std::max({std::abs(grad(k)), std::abs(numeric), 1e-6}));
  }
  return worst;
}

std::vector<pairs::PositivePair> toy_pairs(std::size_t samples, std::uint64_t seed, typing::BpeModel& bpe) {
  const auto corpus = pipeline::synthetic_corpus(samples, seed);
  const auto views = pipeline::sample_views(corpus, seed);
  std::vector<std::vector<std::string>> words;
  for (const auto& s : views) {
    for (const auto& v : s) words.push_back(v.tokens);
  }
  bpe = typing::train_bpe(words, 120);
  return pipeline::make_pair_source(corpus, views, bpe, std::nullopt, seed)(0);
}

}  // namespace

TEST(Config, Validation) {
  auto c = tiny_config();
  EXPECT_NO_THROW(c.validate());
  c.heads = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.lambda = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = tiny_config();
  c.lambda = 0.123456789012345;
  EXPECT_EQ(model::EncoderConfig::from_map(c.to_map()).lambda, c.lambda);
}

TEST(Encoder, ShapeAndDeterminism) {
  model::ModelState s(tiny_config());
  const std::vector<std::int32_t> ids{typing::kCls, 7, 9, 11};
  const Matrix h = model::encode_values(s, ids);
  EXPECT_EQ(h.rows(), 4);
  EXPECT_EQ(h.cols(), 8);
  EXPECT_TRUE(h.allFinite());
  EXPECT_EQ(model::encode_values(s, ids), h);
  EXPECT_THROW(model::encode_values(s, {typing::kCls, 40}), std::out_of_range);
  EXPECT_THROW(model::encode_values(s, std::vector<std::int32_t>(65, 7)), std::invalid_argument);
}

TEST(Encoder, PadTailInvariance) {
  model::ModelState s(tiny_config());
  const std::vector<std::int32_t> ids{typing::kCls, 7, 9, 11};
  const Matrix h = model::encode_values(s, ids);
  for (std::size_t pads : {1u, 3u, 9u}) {
    auto longer = ids;
    longer.insert(longer.end(), pads, typing::kPad);
    const Matrix hp = model::encode_values(s, longer);
    EXPECT_LT((hp.topRows(4) - h).cwiseAbs().maxCoeff(), 1e-12) << pads;
  }
}

TEST(Projection, ZeroWeightsGiveZero) {
  model::ModelState s(tiny_config());
  for (const char* p : {"proj.w1", "proj.b1", "proj.w2", "proj.b2"}) s.get(p).value.setZero();
  EXPECT_EQ(model::embed(s, {typing::kCls, 8, 9}).norm(), 0.0);
}

TEST(Projection, LinearInSecondLayer) {
  model::ModelState s(tiny_config());
  const std::vector<std::int32_t> ids{typing::kCls, 8, 9};
  s.get("proj.b2").value.setZero();
  const Eigen::VectorXd v = model::embed(s, ids);
  s.get("proj.w2").value *= 2.5;
  EXPECT_LT((model::embed(s, ids) - 2.5 * v).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Projection, GradientOfFirstLayer) {
  model::ModelState s(tiny_config());
  const auto b = random_batch(2, 40, 1);
  const auto m = pairs::apply_mlm_mask(pairs::pad(b.anchors), 0.3, 2);
  EXPECT_LE(max_head_error(s, b, m, {true, false, false, false}, "proj.w1"), 1e-4);
}

TEST(PairLoss, ClosedForms) {
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(4, 0.3);
  EXPECT_NEAR(model::pair_loss(v, v, {v, v}), std::log(3.0), 1e-12);

  Eigen::VectorXd a = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
  a(0) = 1.0;
  b(0) = 10.0;
  Eigen::VectorXd neg = Eigen::VectorXd::Zero(2);
  neg(1) = 5.0;
  EXPECT_NEAR(model::pair_loss(a, b, {neg, neg}), -std::log(std::exp(10.0) / (std::exp(10.0) + 2.0)), 1e-15);
  // Quoted as roughly 9.079985e-5 (that is 2 exp(-10)); the exact value sits 4e-9 lower.
  EXPECT_NEAR(model::pair_loss(a, b, {neg, neg}), 9.079985e-5, 1e-4 * 9.079985e-5);
}

TEST(PairLoss, AsymmetricAndStable) {
  Rng rng(4);
  auto rv = [&] {
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v(i) = rng.normal();
    return v;
  };
  const auto a = rv();
  const auto b = rv();
  const std::vector<Eigen::VectorXd> negs{rv(), rv()};
  EXPECT_GT(std::abs(model::pair_loss(a, b, negs) - model::pair_loss(b, a, negs)), 1e-6);
  const double big = model::pair_loss(a * 100, b * 100, {negs[0] * 100, negs[1] * 100});
  EXPECT_TRUE(std::isfinite(big));
  EXPECT_GE(big, 0.0);
}

TEST(Mvcl, IdenticalVectors) {
  const Matrix v = Matrix::Constant(2, 5, 0.2);
  EXPECT_NEAR(model::contrastive_loss(v, v, false).loss, 2.0 * std::log(3.0), 1e-12);
}

TEST(Mvcl, MatchesBruteForce) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    Matrix va(n, 6);
    Matrix vb(n, 6);
    for (Eigen::Index k = 0; k < va.size(); ++k) {
      va(k) = rng.normal();
      vb(k) = rng.normal();
    }
    EXPECT_NEAR(model::contrastive_loss(va, vb, false).loss, brute_force_mvcl(va, vb), 1e-10);
  }
}

TEST(Mvcl, PermutationInvariantAndMonotone) {
  Rng rng(9);
  Matrix va(5, 4);
  Matrix vb(5, 4);
  for (Eigen::Index k = 0; k < va.size(); ++k) {
    va(k) = rng.normal();
    vb(k) = rng.normal();
  }
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(5);
  perm.indices() << 3, 0, 4, 1, 2;
  EXPECT_NEAR(model::contrastive_loss(perm * va, perm * vb, false).loss, model::contrastive_loss(va, vb, false).loss,
              1e-12);

  const Eigen::VectorXd q = va.row(0).transpose();
  const std::vector<Eigen::VectorXd> negs{vb.row(1).transpose(), vb.row(2).transpose()};
  const Eigen::VectorXd p = vb.row(0).transpose();
  EXPECT_LT(model::pair_loss(q, p + 0.5 * q, negs), model::pair_loss(q, p, negs));
}

TEST(Mvcl, GradientMatchesDifferences) {
  Rng rng(10);
  Matrix va(4, 3);
  Matrix vb(4, 3);
  for (Eigen::Index k = 0; k < va.size(); ++k) {
    va(k) = rng.normal();
    vb(k) = rng.normal();
  }
  const auto r = model::contrastive_loss(va, vb, true);
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < va.size(); ++k) {
    Matrix up = va;
    Matrix down = va;
    up(k) += h;
    down(k) -= h;
    const double numeric = (brute_force_mvcl(up, vb) - brute_force_mvcl(down, vb)) / (2 * h);
    EXPECT_NEAR(r.grad_a(k), numeric, 1e-6);
  }
}

TEST(Fgti, UniformAndPerfect) {
  model::ModelState s(tiny_config());
  const auto b = random_batch(2, 40, 1);
  const auto m = pairs::apply_mlm_mask(pairs::pad(b.anchors), 0.3, 2);
  s.get("types.w").value.setZero();
  s.get("types.b").value.setZero();
  const auto uniform = model::batch_loss(s, b, m, {false, true, false, false});
  EXPECT_NEAR(uniform.fgti, std::log(10.0), 1e-12);
  EXPECT_GT(uniform.type_targets, 0u);
  s.get("types.b").value(0, static_cast<int>(TypeLabel::Int)) = 20.0;
  EXPECT_LE(model::batch_loss(s, b, m, {false, true, false, false}).fgti, 1e-6);
}

TEST(Fgti, NoTargetsWarns) {
  model::ModelState s(tiny_config());
  const auto b = random_batch(2, 40, 1, TypeLabel::O);
  const auto m = pairs::apply_mlm_mask(pairs::pad(b.anchors), 0.3, 2);
  const auto l = model::batch_loss(s, b, m, {false, true, false, false});
  EXPECT_EQ(l.fgti, 0.0);
  EXPECT_EQ(l.type_targets, 0u);
  EXPECT_EQ(l.warnings, 1u);
}

TEST(Fgti, HeadGradient) {
  model::ModelState s(tiny_config());
  const auto b = random_batch(2, 40, 5);
  const auto m = pairs::apply_mlm_mask(pairs::pad(b.anchors), 0.3, 2);
  EXPECT_LE(max_head_error(s, b, m, {false, true, false, false}, "types.w"), 1e-4);
}

TEST(Mmlm, UniformOverVocabulary) {
  model::ModelState s(tiny_config(100));
  const auto b = random_batch(3, 100, 6);
  const auto m = pairs::apply_mlm_mask(pairs::pad(b.anchors), 0.5, 3);
  ASSERT_FALSE(m.positions.empty());
  s.get("tokens.w").value.setZero();
  s.get("tokens.b").value.setZero();
  const auto l = model::batch_loss(s, b, m, {false, false, true, false});
  EXPECT_NEAR(l.mmlm, std::log(100.0), 1e-12);
  EXPECT_EQ(l.masked_targets, m.positions.size());
}

TEST(Mmlm, IgnoresUnmaskedLabels) {
  model::ModelState s(tiny_config());
  auto b = random_batch(2, 40, 6);
  const auto m = pairs::apply_mlm_mask(pairs::pad(b.anchors), 0.3, 4);
  const double before = model::batch_loss(s, b, m, {false, false, true, false}).mmlm;
  for (auto& a : b.anchors) std::fill(a.labels.begin() + 1, a.labels.end(), TypeLabel::Str);
  EXPECT_EQ(model::batch_loss(s, b, m, {false, false, true, false}).mmlm, before);
}

TEST(Mmlm, HeadGradient) {
  model::ModelState s(tiny_config());
  const auto b = random_batch(2, 40, 7);
  const auto m = pairs::apply_mlm_mask(pairs::pad(b.anchors), 0.4, 2);
  EXPECT_LE(max_head_error(s, b, m, {false, false, true, false}, "tokens.w"), 1e-4);
}

TEST(Total, SumOfTerms) {
  auto c = tiny_config();
  model::ModelState s(c);
  const auto b = random_batch(2, 40, 8);
  const auto m = pairs::apply_mlm_mask(pairs::pad(b.anchors), 0.3, 5);
  const auto l = model::batch_loss(s, b, m);
  EXPECT_EQ(l.l2, 0.0);
  EXPECT_DOUBLE_EQ(l.total, l.mvcl + l.fgti + l.mmlm);

  c.lambda = 1.0;
  model::ModelState r(c);
  const auto lr = model::batch_loss(r, b, m);
  EXPECT_NEAR(lr.total - (lr.mvcl + lr.fgti + lr.mmlm), r.squared_norm(), 1e-9);
}

TEST(GradCheck, FullModel) {
  auto c = tiny_config();
  c.lambda = 0.01;
  model::ModelState s(c);
  const auto b = random_batch(2, 40, 11);
  const auto m = pairs::apply_mlm_mask(pairs::pad(b.anchors), 0.3, 6);
  const auto r = model::gradient_check(s, b, m, {}, 200, 1);
  EXPECT_EQ(r.samples.size(), 200u);
  EXPECT_LE(r.max_rel_error, 1e-3);
}

TEST(GradCheck, RelativeError) {
  EXPECT_EQ(model::relative_error(1.0, 1.0), 0.0);
  EXPECT_NEAR(model::relative_error(1.0, 0.5), 0.5, 1e-15);
  EXPECT_NEAR(model::relative_error(1e-9, 0.0), 1e-3, 1e-15);
}

TEST(Train, DescendsAndIsDeterministic) {
  typing::BpeModel bpe;
  const auto pool = toy_pairs(8, 2, bpe);
  ASSERT_EQ(pool.size(), 64u);
  auto c = tiny_config(bpe.vocab_size());
  c.max_positions = 514;
  model::TrainConfig tc;
  tc.steps = 50;
  tc.batch_n = 4;
  tc.optimizer.learning_rate = 3e-3;
  const model::PairSource source = [&](std::size_t) { return pool; };

  model::ModelState a(c);
  const auto log_a = model::train(a, source, tc);
  ASSERT_EQ(log_a.steps.size(), 50u);
  double first = 0.0;
  double last = 0.0;
  for (int k = 0; k < 5; ++k) {
    first += log_a.steps[static_cast<std::size_t>(k)].mvcl;
    last += log_a.steps[log_a.steps.size() - 1 - static_cast<std::size_t>(k)].mvcl;
  }
  EXPECT_LT(last, first);

  model::ModelState b(c);
  const auto log_b = model::train(b, source, tc);
  for (std::size_t k = 0; k < log_a.steps.size(); ++k) EXPECT_EQ(log_a.steps[k].total, log_b.steps[k].total);
}

TEST(Train, StrongRegularizerShrinksWeights) {
  typing::BpeModel bpe;
  const auto pool = toy_pairs(8, 3, bpe);
  auto c = tiny_config(bpe.vocab_size());
  c.max_positions = 514;
  const model::PairSource source = [&](std::size_t) { return pool; };
  model::ModelState s(c);
  model::TrainConfig warm;
  warm.steps = 5;
  warm.batch_n = 4;
  model::train(s, source, warm);

  auto strong = c;
  strong.lambda = 1e6;
  model::ModelState r(strong);
  r.params() = s.params();
  model::TrainConfig tc = warm;
  tc.steps = 10;
  tc.optimizer.kind = model::OptimizerKind::Sgd;
  tc.optimizer.learning_rate = 1e-7;
  double prev = r.squared_norm();
  model::train(r, source, tc, [&](std::size_t, const model::LossBreakdown&) {
    const double now = r.squared_norm();
    EXPECT_LT(now, prev);
    prev = now;
  });
  EXPECT_LT(r.squared_norm(), 0.5 * s.squared_norm());
}

TEST(Train, NonFiniteLossNamesTerm) {
  typing::BpeModel bpe;
  const auto pool = toy_pairs(8, 4, bpe);
  auto c = tiny_config(bpe.vocab_size());
  c.max_positions = 514;
  model::ModelState s(c);
  s.get("types.b").value(0, 0) = std::nan("");
  model::TrainConfig tc;
  tc.steps = 2;
  tc.batch_n = 4;
  try {
    model::train(s, [&](std::size_t) { return pool; }, tc);
    FAIL() << "expected a training error";
  } catch (const model::TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("fgti"), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "mvp_test_ckpt";
  std::filesystem::remove_all(dir);
  auto c = tiny_config();
  c.lambda = 0.25;
  model::ModelState s(c);
  model::save_checkpoint(dir / "m.ckpt", s, "abc123", 17);
  const auto ck = model::load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(ck.corpus_hash, "abc123");
  EXPECT_EQ(ck.step, 17u);
  EXPECT_EQ(ck.state.config().to_map(), c.to_map());
  ASSERT_EQ(ck.state.params().size(), s.params().size());
  for (std::size_t i = 0; i < s.params().size(); ++i) {
    EXPECT_EQ(ck.state.params()[i].name, s.params()[i].name);
    EXPECT_EQ(ck.state.params()[i].value, s.params()[i].value);
  }
  EXPECT_THROW(model::load_checkpoint(dir / "missing.ckpt"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(Train, WritesEpochCheckpoints) {
  const auto dir = std::filesystem::temp_directory_path() / "mvp_test_epochs";
  std::filesystem::remove_all(dir);
  typing::BpeModel bpe;
  const auto pool = toy_pairs(8, 5, bpe);
  auto c = tiny_config(bpe.vocab_size());
  c.max_positions = 514;
  model::ModelState s(c);
  model::TrainConfig tc;
  tc.batch_n = 8;
  tc.steps = 20;
  tc.checkpoint_dir = dir;
  const auto log = model::train(s, [&](std::size_t) { return pool; }, tc);
  EXPECT_GE(log.epochs, 2u);
  EXPECT_TRUE(std::filesystem::exists(dir / "epoch-1.ckpt"));
  std::filesystem::remove_all(dir);
}
