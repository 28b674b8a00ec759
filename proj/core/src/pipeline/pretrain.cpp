#include "mvp/pipeline/pretrain.hpp"

#include <memory>
#include <stdexcept>

#include "mvp/frontend/parser.hpp"
#include "mvp/transform/transform.hpp"
#include "mvp/util/random.hpp"

namespace mvp::pipeline {

namespace {

pairs::ViewRecord fresh_pt(const frontend::SyntaxTree& tree, const std::string& id, std::uint64_t seed) {
  const auto variants = transform::generate_variants(tree, seed, 1);
  typing::TypedTokenSequence pt = typing::infer_types(variants.front().tree);
  return {id, pairs::ViewKind::PT, std::move(pt.tokens), std::move(pt.labels), seed};
}

}  // namespace

std::vector<std::vector<pairs::ViewRecord>> sample_views(const std::vector<Sample>& samples, std::uint64_t pt_seed) {
  std::vector<std::vector<pairs::ViewRecord>> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const frontend::SyntaxTree tree = frontend::parse_source(samples[i].code);
    out.push_back(pairs::extract_views(tree, samples[i].id, samples[i].nl, derive_seed(pt_seed, i)));
  }
  return out;
}

model::PairSource make_pair_source(const std::vector<Sample>& samples,
                                   const std::vector<std::vector<pairs::ViewRecord>>& views,
                                   const typing::BpeModel& bpe, std::optional<pairs::ViewKind> drop,
                                   std::uint64_t pt_seed) {
  struct Cache {
    std::vector<frontend::SyntaxTree> trees;
    std::vector<std::vector<pairs::ViewRecord>> encoded;
    std::vector<bool> paired;
  };
  auto cache = std::make_shared<Cache>();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    cache->trees.push_back(frontend::parse_source(samples[i].code));
    std::vector<pairs::ViewRecord> enc;
    for (const auto& v : views[i]) enc.push_back(pairs::encode_view(v, bpe));
    cache->encoded.push_back(std::move(enc));
    cache->paired.push_back(samples[i].nl.has_value());
  }
  return [cache, &bpe, drop, pt_seed, ids = [&] {
            std::vector<std::string> v;
            for (const auto& s : samples) v.push_back(s.id);
            return v;
          }()](std::size_t epoch) {
    std::vector<pairs::PositivePair> out;
    for (std::size_t i = 0; i < cache->encoded.size(); ++i) {
      std::vector<pairs::ViewRecord> views = cache->encoded[i];
      if (epoch > 0) {
        for (auto& v : views) {
          if (v.view == pairs::ViewKind::PT) {
            v = pairs::encode_view(fresh_pt(cache->trees[i], ids[i], derive_seed(derive_seed(pt_seed, i), epoch)), bpe);
          }
        }
      }
      auto p = pairs::make_positive_pairs(views, cache->paired[i], bpe, drop);
      out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    }
    return out;
  };
}

PretrainOptions options_from_config(const Config& config, std::uint64_t seed) {
  PretrainOptions o;
  o.model.d = config.get_size("model.d", o.model.d);
  o.model.layers = config.get_size("model.layers", o.model.layers);
  o.model.heads = config.get_size("model.heads", o.model.heads);
  o.model.ff = config.get_size("model.ff", o.model.ff);
  o.model.max_positions = config.get_size("model.max_positions", o.model.max_positions);
  o.model.lambda = config.get_double("loss.lambda", o.model.lambda);
  o.model.seed = seed;
  o.train.steps = config.get_size("train.steps", o.train.steps);
  o.train.batch_n = config.get_size("train.batch_n", o.train.batch_n);
  o.train.mask_rate = config.get_double("mask.rate", o.train.mask_rate);
  o.train.optimizer.learning_rate = config.get_double("train.lr", o.train.optimizer.learning_rate);
  const std::string opt = config.get("train.optimizer", "adam");
  if (opt == "adam") {
    o.train.optimizer.kind = model::OptimizerKind::Adam;
  } else if (opt == "sgd") {
    o.train.optimizer.kind = model::OptimizerKind::Sgd;
  } else {
    throw std::invalid_argument("train.optimizer must be adam or sgd, not " + opt);
  }
  o.train.seed = seed;
  o.bpe_merges = config.get_size("bpe.merges", o.bpe_merges);
  o.pt_seed = config.get_size("pt.seed", seed);
  if (config.has("train.drop_view")) {
    const auto v = pairs::parse_view(config.get("train.drop_view", ""));
    if (!v) throw std::invalid_argument("train.drop_view names no view");
    o.drop_view = v;
  }
  if (!(o.train.mask_rate > 0.0 && o.train.mask_rate < 1.0)) throw std::invalid_argument("mask.rate must lie in (0, 1)");
  if (o.train.batch_n < 2) throw std::invalid_argument("train.batch_n must be at least 2");
  return o;
}

PretrainResult pretrain(const std::vector<Sample>& samples, const PretrainOptions& options) {
  const auto views = sample_views(samples, options.pt_seed);
  std::vector<std::vector<std::string>> corpus;
  for (const auto& sample : views) {
    for (const auto& v : sample) corpus.push_back(v.tokens);
  }
  typing::BpeModel bpe = typing::train_bpe(corpus, options.bpe_merges);
  model::EncoderConfig config = options.model;
  config.vocab_size = bpe.vocab_size();
  PretrainResult result{std::move(bpe), model::ModelState(config), {}};
  const model::PairSource source = make_pair_source(samples, views, result.bpe, options.drop_view, options.pt_seed);
  result.log = model::train(result.state, source, options.train);
  return result;
}

RetrievalResult evaluate_nl_to_code(model::ModelState& state, const typing::BpeModel& bpe,
                                    const std::vector<Sample>& samples) {
  std::vector<Eigen::VectorXd> queries;
  std::vector<Eigen::VectorXd> candidates;
  for (const Sample& s : samples) {
    if (!s.nl) continue;
    const frontend::SyntaxTree tree = frontend::parse_source(s.code);
    std::vector<std::string> words = pairs::nl_words(*s.nl);
    std::vector<typing::TypeLabel> none(words.size(), typing::TypeLabel::O);
    const pairs::ViewRecord nl{s.id, pairs::ViewKind::NL, std::move(words), std::move(none), std::nullopt};
    typing::TypedTokenSequence pl = typing::infer_types(tree);
    const pairs::ViewRecord code{s.id, pairs::ViewKind::PL, std::move(pl.tokens), std::move(pl.labels), std::nullopt};
    queries.push_back(model::embed(state, pairs::assemble_single(pairs::encode_view(nl, bpe), bpe).ids));
    candidates.push_back(model::embed(state, pairs::assemble_single(pairs::encode_view(code, bpe), bpe).ids));
  }
  if (queries.empty()) throw std::invalid_argument("no described samples to evaluate");
  return rank_by_dot_product(queries, candidates);
}

}  // namespace mvp::pipeline
