#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "mvp/frontend/token.hpp"
#include "mvp/frontend/parser.hpp"
#include "mvp/model/encoder.hpp"
#include "mvp/pipeline/oracle.hpp"
#include "mvp/transform/transform.hpp"
#include "mvp/typing/bpe.hpp"
#include "mvp/views/cfg.hpp"

using namespace mvp;

namespace {

const std::vector<pipeline::OracleProgram>& programs() {
  static const auto p = pipeline::load_oracle_corpus(std::string(MVP_DATA_DIR) + "/programs.jsonl");
  return p;
}

std::vector<std::vector<std::string>> leaf_corpus() {
  std::vector<std::vector<std::string>> out;
  for (const auto& p : programs()) out.push_back(frontend::leaf_texts(frontend::parse_source(p.code).root));
  return out;
}

void BM_Tokenize(benchmark::State& state) {
  for (auto _ : state) {
    for (const auto& p : programs()) benchmark::DoNotOptimize(frontend::tokenize(p.code));
  }
}
BENCHMARK(BM_Tokenize);

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) {
    for (const auto& p : programs()) benchmark::DoNotOptimize(frontend::parse_source(p.code));
  }
}
BENCHMARK(BM_Parse);

void BM_BuildCfgs(benchmark::State& state) {
  std::vector<frontend::SyntaxTree> trees;
  for (const auto& p : programs()) trees.push_back(frontend::parse_source(p.code));
  for (auto _ : state) {
    for (const auto& t : trees) benchmark::DoNotOptimize(views::build_program_cfgs(t));
  }
}
BENCHMARK(BM_BuildCfgs);

void BM_Variants(benchmark::State& state) {
  std::vector<frontend::SyntaxTree> trees;
  for (const auto& p : programs()) trees.push_back(frontend::parse_source(p.code));
  for (auto _ : state) {
    for (const auto& t : trees) benchmark::DoNotOptimize(transform::generate_variants(t, 1, 3));
  }
}
BENCHMARK(BM_Variants);

void BM_BpeTrain(benchmark::State& state) {
  const auto corpus = leaf_corpus();
  for (auto _ : state) benchmark::DoNotOptimize(typing::train_bpe(corpus, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_BpeTrain)->Arg(100)->Arg(400);

void BM_BpeEncode(benchmark::State& state) {
  const auto corpus = leaf_corpus();
  const auto bpe = typing::train_bpe(corpus, 400);
  for (auto _ : state) {
    for (const auto& seq : corpus) {
      for (const auto& w : seq) benchmark::DoNotOptimize(bpe.encode(w));
    }
  }
}
BENCHMARK(BM_BpeEncode);

void BM_EncoderForward(benchmark::State& state) {
  model::EncoderConfig c;
  c.vocab_size = 500;
  c.d = 32;
  c.layers = 2;
  c.heads = 4;
  c.ff = 64;
  model::ModelState s(c);
  std::vector<std::int32_t> ids(static_cast<std::size_t>(state.range(0)), 10);
  ids[0] = typing::kCls;
  for (auto _ : state) benchmark::DoNotOptimize(model::embed(s, ids));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EncoderForward)->RangeMultiplier(4)->Range(16, 512)->Complexity();

}  // namespace

BENCHMARK_MAIN();
