#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "corpus_paths.hpp"
#include "mvp/frontend/parser.hpp"
#include "mvp/pairs/pairs.hpp"
#include "mvp/pairs/views.hpp"

using namespace mvp;
using pairs::ViewKind;
using typing::TypeLabel;

namespace {

const char* kProgram = "def total(xs):\n    s = 0\n    for x in xs:\n        s = s + x\n    return s\n";

typing::BpeModel small_bpe() {
  std::vector<std::vector<std::string>> corpus;
  for (const auto& p : mvp::testing::oracle_corpus()) {
    for (const auto& v : pairs::extract_views(frontend::parse_source(p.code), p.name, "sum the items", 0)) {
      corpus.push_back(v.tokens);
    }
  }
  return typing::train_bpe(corpus, 200);
}

const typing::BpeModel& bpe() {
  static const typing::BpeModel model = small_bpe();
  return model;
}

std::vector<pairs::ViewRecord> encoded_views(const std::string& code, const std::string& id,
                                             const std::optional<std::string>& nl, std::uint64_t seed = 0) {
  std::vector<pairs::ViewRecord> out;
  for (const auto& v : pairs::extract_views(frontend::parse_source(code), id, nl, seed)) {
    out.push_back(pairs::encode_view(v, bpe()));
  }
  return out;
}

pairs::ViewRecord record_of(ViewKind view, std::size_t length, const std::string& id = "s") {
  pairs::ViewRecord r{id, view, {}, {}, std::nullopt};
  for (std::size_t i = 0; i < length; ++i) {
    r.tokens.push_back(i % 2 ? "s</w>" : "x</w>");
    r.labels.push_back(view == ViewKind::NL ? TypeLabel::O : TypeLabel::Int);
  }
  return r;
}

std::vector<pairs::PositivePair> corpus_pairs(std::size_t copies) {
  std::vector<pairs::PositivePair> out;
  std::size_t k = 0;
  for (std::size_t c = 0; c < copies; ++c) {
    for (const auto& p : mvp::testing::oracle_corpus()) {
      const bool paired = k % 3 != 0;
      const auto views = encoded_views(p.code, "id" + std::to_string(k), paired ? std::optional<std::string>("describe it") : std::nullopt, k);
      for (auto& pair : pairs::make_positive_pairs(views, paired, bpe())) out.push_back(std::move(pair));
      ++k;
    }
  }
  return out;
}

}  // namespace

TEST(Views, ExtractAll) {
  const auto views = pairs::extract_views(frontend::parse_source(kProgram), "s0", "sum the items", 7);
  ASSERT_EQ(views.size(), 5u);
  std::set<ViewKind> kinds;
  for (const auto& v : views) {
    kinds.insert(v.view);
    EXPECT_EQ(v.tokens.size(), v.labels.size());
    EXPECT_EQ(v.sample_id, "s0");
    EXPECT_EQ(v.seed.has_value(), v.view == ViewKind::PT);
  }
  EXPECT_EQ(kinds.size(), 5u);
  const auto unpaired = pairs::extract_views(frontend::parse_source(kProgram), "s0", std::nullopt, 7);
  EXPECT_EQ(unpaired.size(), 4u);
  EXPECT_TRUE(std::none_of(unpaired.begin(), unpaired.end(), [](auto& v) { return v.view == ViewKind::NL; }));
}

TEST(Views, NlAndStructureTokensAreO) {
  const auto views = pairs::extract_views(frontend::parse_source(kProgram), "s0", "sum the items", 0);
  for (const auto& v : views) {
    for (std::size_t i = 0; i < v.tokens.size(); ++i) {
      if (v.view == ViewKind::NL || v.tokens[i] == "<blk>" || v.tokens[i] == "assignment") {
        EXPECT_EQ(v.labels[i], TypeLabel::O) << v.tokens[i];
      }
    }
  }
}

TEST(Assemble, Single) {
  const auto in = pairs::assemble_single(record_of(ViewKind::PL, 3), bpe());
  ASSERT_EQ(in.ids.size(), 4u);
  EXPECT_EQ(in.ids[0], typing::kCls);
  EXPECT_EQ(in.labels[0], TypeLabel::O);
  EXPECT_EQ(in.labels[1], TypeLabel::Int);
  EXPECT_EQ(pairs::assemble_single(record_of(ViewKind::PL, 600), bpe()).ids.size(), 512u);
  EXPECT_EQ(pairs::assemble_single(record_of(ViewKind::PL, 3), bpe()), in);
  EXPECT_THROW(pairs::assemble_single(record_of(ViewKind::PL, 0), bpe()), std::invalid_argument);
}

TEST(Assemble, Dual) {
  const auto minimal = pairs::assemble_dual(record_of(ViewKind::NL, 1), record_of(ViewKind::PL, 1), bpe());
  EXPECT_EQ(minimal.ids, (std::vector<std::int32_t>{typing::kCls, bpe().id("x</w>"), typing::kSep, bpe().id("x</w>")}));
  const auto long_nl = pairs::assemble_dual(record_of(ViewKind::NL, 100), record_of(ViewKind::AST, 500), bpe());
  const auto sep = std::find(long_nl.ids.begin(), long_nl.ids.end(), typing::kSep) - long_nl.ids.begin();
  EXPECT_EQ(sep, 1 + 96);
  EXPECT_EQ(long_nl.ids.size(), 1u + 96u + 1u + 416u);
  EXPECT_EQ(std::count(long_nl.ids.begin(), long_nl.ids.end(), typing::kSep), 1);
  EXPECT_THROW(pairs::assemble_dual(record_of(ViewKind::NL, 2, "a"), record_of(ViewKind::PL, 2, "b"), bpe()),
               std::invalid_argument);
  EXPECT_THROW(pairs::assemble_dual(record_of(ViewKind::PL, 2), record_of(ViewKind::PL, 2), bpe()),
               std::invalid_argument);
}

TEST(PositivePairs, EightForPaired) {
  const auto views = encoded_views(kProgram, "s0", "sum the items");
  const auto ps = pairs::make_positive_pairs(views, true, bpe());
  ASSERT_EQ(ps.size(), 8u);
  const std::vector<std::string> expected = {"NL|PL", "NL|PT",        "PL|AST",       "PL|CFG",
                                             "PL|PT", "NL+PL|NL+AST", "NL+PL|NL+CFG", "NL+PL|NL+PT"};
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_EQ(ps[i].combo, i);
    EXPECT_EQ(ps[i].anchor.sample_id, "s0");
    EXPECT_EQ(ps[i].positive.sample_id, "s0");
    const auto& combo = pairs::all_combos()[i];
    EXPECT_EQ(combo.dual, i >= 5);
    if (combo.dual) {
      const auto& a = ps[i].anchor.ids;
      const auto& b = ps[i].positive.ids;
      const auto sep = std::find(a.begin(), a.end(), typing::kSep) - a.begin();
      ASSERT_LT(static_cast<std::size_t>(sep), a.size());
      EXPECT_TRUE(std::equal(a.begin(), a.begin() + sep + 1, b.begin()));
      EXPECT_EQ(ps[i].anchor.second, ViewKind::PL);
    }
  }
  std::vector<std::string> names;
  for (const auto& c : pairs::all_combos()) names.push_back(c.name());
  EXPECT_EQ(names, expected);
}

TEST(PositivePairs, ThreeForUnpaired) {
  const auto views = encoded_views(kProgram, "s0", std::nullopt);
  const auto ps = pairs::make_positive_pairs(views, false, bpe());
  ASSERT_EQ(ps.size(), 3u);
  std::set<std::pair<ViewKind, ViewKind>> kinds;
  for (const auto& p : ps) kinds.emplace(p.anchor.first, p.positive.first);
  EXPECT_EQ(kinds, (std::set<std::pair<ViewKind, ViewKind>>{
                       {ViewKind::PL, ViewKind::AST}, {ViewKind::PL, ViewKind::CFG}, {ViewKind::PL, ViewKind::PT}}));
}

TEST(PositivePairs, MissingViewNamed) {
  auto views = encoded_views(kProgram, "s0", std::nullopt);
  views.erase(std::remove_if(views.begin(), views.end(), [](auto& v) { return v.view == ViewKind::CFG; }), views.end());
  try {
    pairs::make_positive_pairs(views, false, bpe());
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("CFG"), std::string::npos);
  }
  EXPECT_EQ(pairs::make_positive_pairs(views, false, bpe(), ViewKind::CFG).size(), 2u);
}

TEST(Batches, NegativeSetsAndDistinctSamples) {
  const auto pool = corpus_pairs(2);
  for (std::size_t n : {2u, 4u, 8u}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto batches = pairs::make_batches(pool, n, seed);
      ASSERT_FALSE(batches.empty());
      for (const auto& b : batches) {
        ASSERT_EQ(b.size(), n);
        std::set<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) {
          EXPECT_EQ(b.anchors[i].sample_id, b.positives[i].sample_id);
          ids.insert(b.anchors[i].sample_id);
          for (auto dir : {pairs::Direction::AnchorToPositive, pairs::Direction::PositiveToAnchor}) {
            const auto neg = pairs::negatives(b, i, dir);
            EXPECT_EQ(neg.intra.size(), n - 1);
            EXPECT_EQ(neg.inter.size(), n - 1);
            EXPECT_EQ(std::count(neg.intra.begin(), neg.intra.end(), i), 0);
            EXPECT_EQ(std::count(neg.inter.begin(), neg.inter.end(), i), 0);
          }
        }
        EXPECT_EQ(ids.size(), n);
      }
    }
  }
  EXPECT_THROW(pairs::make_batches(pool, 1, 0), std::invalid_argument);
}

TEST(Batches, HomogeneousAndDeterministic) {
  const auto pool = corpus_pairs(1);
  const auto a = pairs::make_batches(pool, 4, 11);
  const auto b = pairs::make_batches(pool, 4, 11);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].combo, b[k].combo);
    EXPECT_EQ(a[k].anchors, b[k].anchors);
    const auto& combo = pairs::all_combos()[a[k].combo];
    for (const auto& in : a[k].anchors) EXPECT_EQ(in.form == pairs::Form::Dual, combo.dual);
  }
  EXPECT_NE(pairs::make_batches(pool, 4, 12)[0].anchors, a[0].anchors);
}

TEST(Batches, ShortTailDropped) {
  auto pool = corpus_pairs(1);
  std::vector<pairs::PositivePair> one_combo;
  for (auto& p : pool) {
    if (p.combo == 2) one_combo.push_back(p);
  }
  const std::size_t n = 8;
  const auto batches = pairs::make_batches(one_combo, n, 0);
  EXPECT_EQ(batches.size(), one_combo.size() / n);
}

TEST(Mask, RateAndSpecials) {
  std::vector<pairs::InputSequence> rows;
  for (const auto& p : corpus_pairs(2)) rows.push_back(p.anchor);
  const auto tokens = pairs::pad(rows);
  std::size_t maskable = 0;
  for (auto id : tokens.ids) maskable += id >= static_cast<std::int32_t>(typing::kSpecialCount) ? 1 : 0;
  ASSERT_GE(maskable, 10000u);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto m = pairs::apply_mlm_mask(tokens, 0.15, seed);
    const double rate = static_cast<double>(m.positions.size()) / static_cast<double>(maskable);
    EXPECT_GE(rate, 0.14);
    EXPECT_LE(rate, 0.16);
    for (std::size_t k = 0; k < m.positions.size(); ++k) {
      EXPECT_GE(m.originals[k], static_cast<std::int32_t>(typing::kSpecialCount));
      EXPECT_EQ(m.tokens.ids[m.positions[k]], typing::kMask);
      EXPECT_EQ(tokens.ids[m.positions[k]], m.originals[k]);
    }
    EXPECT_EQ(pairs::apply_mlm_mask(tokens, 0.15, seed).positions, m.positions);
  }
  EXPECT_THROW(pairs::apply_mlm_mask(tokens, 0.0, 0), std::invalid_argument);
}

TEST(Pad, PadsToLongestRow) {
  std::vector<pairs::InputSequence> rows(2);
  rows[0].ids = {1, 7, 8};
  rows[0].labels = {TypeLabel::O, TypeLabel::Int, TypeLabel::O};
  rows[1].ids = {1};
  rows[1].labels = {TypeLabel::O};
  const auto m = pairs::pad(rows);
  EXPECT_EQ(m.rows, 2u);
  EXPECT_EQ(m.cols, 3u);
  EXPECT_EQ(m.ids, (std::vector<std::int32_t>{1, 7, 8, 1, typing::kPad, typing::kPad}));
  EXPECT_EQ(m.labels[1], TypeLabel::Int);
  EXPECT_EQ(m.labels[4], TypeLabel::O);
}
