#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpus_paths.hpp"
#include "mvp/pipeline/config.hpp"
#include "mvp/pipeline/corpus.hpp"
#include "mvp/pipeline/oracle.hpp"
#include "mvp/pipeline/pretrain.hpp"
#include "mvp/pipeline/retrieval.hpp"
#include "mvp/pipeline/synthetic.hpp"
#include "mvp/util/error.hpp"

using namespace mvp;
using pairs::ViewKind;

namespace {

pipeline::IngestResult ingest_text(const std::string& text, std::uint64_t seed = 0) {
  std::istringstream in(text);
  return pipeline::ingest_stream(in, seed);
}

const std::string kTwoRecords =
    "{\"id\": \"a\", \"code\": \"def add(a, b):\\n    return a + b\\n\", \"nl\": \"add two numbers\"}\n"
    "{\"id\": \"b\", \"code\": \"x = 1\\ny = x + 2\\n\"}\n";

}  // namespace

TEST(Config, ParsesAndOverrides) {
  const auto c = pipeline::Config::parse("# comment\nmodel.d = 16\ntrain.lr=0.01  # trailing\nmodel.d = 24\n\n");
  EXPECT_EQ(c.get_size("model.d", 0), 24u);
  EXPECT_DOUBLE_EQ(c.get_double("train.lr", 0), 0.01);
  EXPECT_EQ(c.get("absent", "dflt"), "dflt");
  EXPECT_FALSE(c.has("absent"));
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(pipeline::Config::parse("just words\n"), std::invalid_argument);
  EXPECT_THROW(pipeline::Config::parse(" = 3\n"), std::invalid_argument);
  const auto c = pipeline::Config::parse("a = x\nb = -2\nc = 1.5\n");
  EXPECT_THROW(c.get_double("a", 0), std::invalid_argument);
  EXPECT_THROW(c.get_size("b", 0), std::invalid_argument);
  EXPECT_THROW(c.get_size("c", 0), std::invalid_argument);
  EXPECT_THROW(pipeline::Config::load("/nonexistent/mvp.cfg"), IoError);
}

TEST(Options, FromConfig) {
  const auto c = pipeline::Config::parse(
      "model.d = 16\nmodel.layers = 1\nmodel.heads = 2\nloss.lambda = 0.5\ntrain.steps = 7\ntrain.batch_n = 4\n"
      "train.optimizer = sgd\nmask.rate = 0.2\nbpe.merges = 33\ntrain.drop_view = CFG\n");
  const auto o = pipeline::options_from_config(c, 9);
  EXPECT_EQ(o.model.d, 16u);
  EXPECT_EQ(o.model.layers, 1u);
  EXPECT_EQ(o.model.lambda, 0.5);
  EXPECT_EQ(o.train.steps, 7u);
  EXPECT_EQ(o.train.batch_n, 4u);
  EXPECT_EQ(o.train.optimizer.kind, model::OptimizerKind::Sgd);
  EXPECT_EQ(o.train.mask_rate, 0.2);
  EXPECT_EQ(o.bpe_merges, 33u);
  EXPECT_EQ(o.drop_view, ViewKind::CFG);
  EXPECT_EQ(o.pt_seed, 9u);

  for (const char* bad : {"train.optimizer = rmsprop", "mask.rate = 0", "mask.rate = 1", "train.batch_n = 1",
                          "train.drop_view = XYZ"}) {
    EXPECT_THROW(pipeline::options_from_config(pipeline::Config::parse(bad), 0), std::invalid_argument) << bad;
  }
}

TEST(Ingest, PairedAndUnpaired) {
  const auto r = ingest_text(kTwoRecords);
  EXPECT_EQ(r.manifest.paired, 1u);
  EXPECT_EQ(r.manifest.unpaired, 1u);
  EXPECT_EQ(r.manifest.parse_skips, 0u);
  ASSERT_EQ(r.samples.size(), 2u);
  EXPECT_EQ(r.manifest.view_counts.at("NL"), 1u);
  for (const char* v : {"PL", "AST", "CFG", "PT"}) EXPECT_EQ(r.manifest.view_counts.at(v), 2u) << v;
  std::set<std::string> ids;
  for (const auto& rec : r.records) ids.insert(rec.sample_id);
  EXPECT_EQ(ids, (std::set<std::string>{"a", "b"}));
}

TEST(Ingest, SkipsUnsupportedAndMalformed) {
  const auto r = ingest_text(kTwoRecords + "{\"code\": \"class A:\\n    pass\\n\"}\nnot json\n{\"nl\": \"no code\"}\n");
  EXPECT_EQ(r.manifest.paired + r.manifest.unpaired, 2u);
  EXPECT_EQ(r.manifest.parse_skips, 1u);
  EXPECT_EQ(r.manifest.malformed_skips, 2u);
  EXPECT_EQ(r.manifest.skip_notes.size(), 3u);
}

TEST(Ingest, HashIsContentAddressed) {
  const auto a = ingest_text(kTwoRecords);
  const auto b = ingest_text(kTwoRecords);
  EXPECT_EQ(a.manifest.hash, b.manifest.hash);
  EXPECT_EQ(a.manifest.hash, pipeline::records_hash(a.records));
  std::string changed = kTwoRecords;
  changed.replace(changed.find("x + 2"), 5, "x + 3");
  EXPECT_NE(ingest_text(changed).manifest.hash, a.manifest.hash);
}

TEST(Ingest, WritesFilesThatReadBack) {
  const auto dir = std::filesystem::temp_directory_path() / "mvp_test_ingest";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "in.jsonl") << kTwoRecords;
  }
  const auto m = pipeline::ingest(dir / "in.jsonl", dir / "out", 0);
  const auto records = pipeline::read_view_records(dir / "out" / "views.jsonl");
  EXPECT_EQ(records, ingest_text(kTwoRecords).records);
  EXPECT_EQ(pipeline::records_hash(records), m.hash);
  const auto samples = pipeline::read_samples(dir / "out" / "samples.jsonl");
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[0].nl, "add two numbers");
  EXPECT_FALSE(samples[1].nl.has_value());
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "manifest.json"));
  EXPECT_THROW(pipeline::ingest(dir / "missing.jsonl", dir / "x", 0), IoError);
  std::filesystem::remove_all(dir);
}

TEST(ViewRecords, JsonRoundTrip) {
  for (const auto& r : ingest_text(kTwoRecords).records) {
    EXPECT_EQ(pipeline::parse_view_record(pipeline::view_record_json(r)), r);
  }
  EXPECT_THROW(pipeline::parse_view_record("{\"id\": \"a\", \"view\": \"XYZ\", \"tokens\": [], \"labels\": []}"),
               std::invalid_argument);
}

TEST(Retrieval, MeanReciprocalRank) {
  EXPECT_NEAR(pipeline::mean_reciprocal_rank({1, 2, 4}), (1.0 + 0.5 + 0.25) / 3.0, 1e-15);
  EXPECT_NEAR(pipeline::mean_reciprocal_rank({1, 2, 4}), 0.583333, 1e-6);
  EXPECT_THROW(pipeline::mean_reciprocal_rank({0}), std::invalid_argument);
}

TEST(Retrieval, AveragePrecisionAtR) {
  EXPECT_DOUBLE_EQ(pipeline::average_precision_at_r({true, true, false}, 2), 1.0);
  // Hits at ranks 1 and 3 with R = 2: only the first counts, (1/1) / 2.
  EXPECT_DOUBLE_EQ(pipeline::average_precision_at_r({true, false, true}, 2), 0.5);
  EXPECT_DOUBLE_EQ(pipeline::average_precision_at_r({false, true, true}, 2), 0.25);
}

TEST(Retrieval, RankOfCountsStrictlyBetter) {
  Eigen::VectorXd s(4);
  s << 0.5, 0.9, 0.5, 0.1;
  EXPECT_EQ(pipeline::rank_of(s, 0), 2u);
  EXPECT_EQ(pipeline::rank_of(s, 1), 1u);
  EXPECT_EQ(pipeline::rank_of(s, 3), 4u);
}

TEST(Retrieval, DotProductRanking) {
  std::vector<Eigen::VectorXd> q{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)};
  std::vector<Eigen::VectorXd> c{Eigen::Vector2d(1, 0), Eigen::Vector2d(2, 0), Eigen::Vector2d(0, -1)};
  const auto r = pipeline::rank_by_dot_product(q, c);
  // Second query ties with a distractor at 0; ties do not count against it.
  EXPECT_EQ(r.ranks, (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(r.pool_size, 3u);
  EXPECT_THROW(pipeline::rank_by_dot_product(c, q), std::invalid_argument);
}

TEST(Retrieval, MapByGroup) {
  std::vector<Eigen::VectorXd> v{Eigen::Vector2d(1, 0), Eigen::Vector2d(0.9, 0.1), Eigen::Vector2d(0, 1),
                                 Eigen::Vector2d(0.1, 0.9)};
  EXPECT_DOUBLE_EQ(pipeline::map_at_r_by_group(v, {0, 0, 1, 1}), 1.0);
  EXPECT_LT(pipeline::map_at_r_by_group(v, {0, 1, 0, 1}), 1.0);
}

TEST(Retrieval, RandomBaselineMatchesHarmonicMean) {
  double harmonic = 0.0;
  for (int k = 1; k <= 50; ++k) harmonic += 1.0 / k;
  EXPECT_NEAR(pipeline::random_baseline_mrr(50, 1000, 7), harmonic / 50.0, 0.01);
  EXPECT_EQ(pipeline::random_baseline_mrr(50, 100, 3), pipeline::random_baseline_mrr(50, 100, 3));
}

TEST(Synthetic, DeterministicAndDescribed) {
  const auto a = pipeline::synthetic_corpus(40, 5);
  const auto b = pipeline::synthetic_corpus(40, 5);
  ASSERT_EQ(a.size(), 40u);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].code, b[i].code);
    EXPECT_EQ(a[i].nl, b[i].nl);
    EXPECT_TRUE(a[i].nl.has_value());
    ids.insert(a[i].id);
  }
  EXPECT_EQ(ids.size(), a.size());
  EXPECT_NE(pipeline::synthetic_corpus(40, 6)[0].code + pipeline::synthetic_corpus(40, 6)[1].code,
            a[0].code + a[1].code);
}

TEST(Synthetic, EveryProgramIngests) {
  std::ostringstream text;
  for (const auto& s : pipeline::synthetic_corpus(60, 2)) text << pipeline::sample_json(s) << "\n";
  const auto r = ingest_text(text.str());
  EXPECT_EQ(r.manifest.paired, 60u);
  EXPECT_EQ(r.manifest.parse_skips, 0u);
}

TEST(Views, SampleViewsPerSample) {
  const auto samples = ingest_text(kTwoRecords).samples;
  const auto views = pipeline::sample_views(samples, 3);
  ASSERT_EQ(views.size(), 2u);
  EXPECT_EQ(views[0].size(), 5u);
  EXPECT_EQ(views[1].size(), 4u);
  EXPECT_EQ(pipeline::sample_views(samples, 3), views);
}

TEST(Pretrain, PairSourceRegeneratesPtAfterFirstEpoch) {
  const auto samples = pipeline::synthetic_corpus(6, 1);
  const auto views = pipeline::sample_views(samples, 0);
  std::vector<std::vector<std::string>> words;
  for (const auto& s : views) {
    for (const auto& v : s) words.push_back(v.tokens);
  }
  const auto bpe = typing::train_bpe(words, 80);
  const auto source = pipeline::make_pair_source(samples, views, bpe, std::nullopt, 0);
  const auto e0 = source(0);
  EXPECT_EQ(e0.size(), 48u);
  const auto again = source(0);
  bool pt_changed = false;
  const auto e1 = source(1);
  ASSERT_EQ(e1.size(), e0.size());
  for (std::size_t i = 0; i < e0.size(); ++i) {
    EXPECT_EQ(e0[i].anchor, again[i].anchor);
    if (pairs::all_combos()[e0[i].combo].uses(ViewKind::PT) && !(e0[i].positive == e1[i].positive)) pt_changed = true;
  }
  EXPECT_TRUE(pt_changed);

  const auto dropped = pipeline::make_pair_source(samples, views, bpe, ViewKind::CFG, 0)(0);
  EXPECT_EQ(dropped.size(), 6u * 6u);
}

TEST(Pretrain, SmallRunEvaluates) {
  const auto samples = pipeline::synthetic_corpus(16, 4);
  pipeline::PretrainOptions o;
  o.model.d = 8;
  o.model.layers = 1;
  o.model.heads = 2;
  o.model.ff = 16;
  o.train.steps = 6;
  o.train.batch_n = 4;
  o.bpe_merges = 60;
  auto r = pipeline::pretrain(samples, o);
  EXPECT_EQ(r.log.steps.size(), 6u);
  EXPECT_EQ(r.state.config().vocab_size, r.bpe.vocab_size());
  const auto ev = pipeline::evaluate_nl_to_code(r.state, r.bpe, samples);
  EXPECT_EQ(ev.ranks.size(), 16u);
  EXPECT_EQ(ev.pool_size, 16u);
  EXPECT_GT(ev.mrr, 0.0);
  EXPECT_LE(ev.mrr, 1.0);

  std::vector<pipeline::Sample> bare = samples;
  for (auto& s : bare) s.nl.reset();
  EXPECT_THROW(pipeline::evaluate_nl_to_code(r.state, r.bpe, bare), std::invalid_argument);
}

TEST(Oracle, CorpusLoadsAndTransformsAgree) {
  const auto& corpus = mvp::testing::oracle_corpus();
  ASSERT_FALSE(corpus.empty());
  for (std::size_t i = 0; i < std::min<std::size_t>(corpus.size(), 5); ++i) {
    for (const auto& r : pipeline::check_program_transforms(corpus[i], 0, 2)) {
      EXPECT_EQ(r.mismatches, 0u) << r.program << " " << r.variant << " " << r.detail;
      EXPECT_EQ(r.cases, corpus[i].cases.size());
    }
  }
}
