#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvp/frontend/parser.hpp"
#include "mvp/model/train.hpp"
#include "mvp/pairs/views.hpp"
#include "mvp/pipeline/config.hpp"
#include "mvp/pipeline/corpus.hpp"
#include "mvp/pipeline/oracle.hpp"
#include "mvp/pipeline/pretrain.hpp"
#include "mvp/pipeline/retrieval.hpp"
#include "mvp/pipeline/synthetic.hpp"
#include "mvp/typing/bpe.hpp"
#include "mvp/util/error.hpp"
#include "mvp/util/random.hpp"

namespace fs = std::filesystem;
using namespace mvp;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kIo = 2;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

pipeline::Config load_config(const std::string& path) {
  return path.empty() ? pipeline::Config{} : pipeline::Config::load(path);
}

int cmd_ingest(const std::string& input, const std::string& out, std::uint64_t seed) {
  const pipeline::CorpusManifest m = pipeline::ingest(input, out, seed);
  std::cout << pipeline::manifest_json(m) << "\n";
  return kOk;
}

int cmd_views(const std::string& source, const std::string& nl, const std::string& id, std::uint64_t seed,
              const std::string& out) {
  const frontend::SyntaxTree tree = frontend::parse_source(read_text(source));
  const std::optional<std::string> description = nl.empty() ? std::nullopt : std::optional<std::string>(nl);
  const auto records = pairs::extract_views(tree, id, description, seed);
  if (!out.empty()) {
    pipeline::write_view_records(out, records);
    return kOk;
  }
  for (const auto& r : records) std::cout << pipeline::view_record_json(r) << "\n";
  return kOk;
}

int cmd_transform_check(const std::string& corpus, std::uint64_t seed, std::size_t variants) {
  const auto programs = pipeline::load_oracle_corpus(corpus);
  std::size_t failed = 0;
  for (const auto& p : programs) {
    std::size_t checks = 0;
    std::string detail;
    bool ok = true;
    for (const auto& r : pipeline::check_program_transforms(p, seed, variants)) {
      ++checks;
      if (r.mismatches > 0 && ok) {
        ok = false;
        detail = r.variant + ": " + r.detail;
      }
    }
    std::cout << (ok ? "PASS " : "FAIL ") << p.name << " (" << checks << " variants, " << p.cases.size()
              << " inputs)";
    if (!ok) std::cout << " " << detail;
    std::cout << "\n";
    if (!ok) ++failed;
  }
  std::cout << (programs.size() - failed) << "/" << programs.size() << " programs equivalent\n";
  return failed == 0 ? kOk : kValidation;
}

int cmd_bpe_train(const std::string& views, std::size_t merges, const std::string& out) {
  std::vector<std::vector<std::string>> corpus;
  for (const auto& r : pipeline::read_view_records(views)) corpus.push_back(r.tokens);
  const typing::BpeModel bpe = typing::train_bpe(corpus, merges);
  bpe.save(out);
  std::cout << "merges " << bpe.merges().size() << " vocab " << bpe.vocab_size() << "\n";
  return kOk;
}

std::string corpus_hash(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.json";
  if (!fs::exists(manifest)) return {};
  return nlohmann::json::parse(read_text(manifest)).value("hash", std::string{});
}

int cmd_pretrain(const std::string& corpus_dir, const std::string& out, const std::string& config_path,
                 std::uint64_t seed) {
  const pipeline::Config config = load_config(config_path);
  pipeline::PretrainOptions options = pipeline::options_from_config(config, seed);
  const auto samples = pipeline::read_samples(fs::path(corpus_dir) / "samples.jsonl");
  if (samples.empty()) throw std::invalid_argument("corpus has no samples");
  ensure_dir(out);
  options.train.checkpoint_dir = out;
  options.train.corpus_hash = corpus_hash(corpus_dir);

  const pipeline::PretrainResult r = pipeline::pretrain(samples, options);
  r.bpe.save(fs::path(out) / "bpe.txt");
  model::save_checkpoint(fs::path(out) / "model.ckpt", r.state, options.train.corpus_hash, r.log.steps.size());

  std::ofstream csv(fs::path(out) / "loss.csv");
  if (!csv) throw IoError("cannot write " + (fs::path(out) / "loss.csv").string());
  csv << "step,mvcl,fgti,mmlm,l2,total\n" << std::setprecision(10);
  for (std::size_t i = 0; i < r.log.steps.size(); ++i) {
    const auto& s = r.log.steps[i];
    csv << i + 1 << "," << s.mvcl << "," << s.fgti << "," << s.mmlm << "," << s.l2 << "," << s.total << "\n";
  }
  if (!csv) throw IoError("failed writing loss.csv");
  const auto& last = r.log.steps.back();
  std::cout << "steps " << r.log.steps.size() << " epochs " << r.log.epochs << " vocab " << r.bpe.vocab_size()
            << " final loss " << last.total << "\n";
  return kOk;
}

// Samples may carry a "group" field; vectors sharing a group count as relevant for MAP@R.
std::vector<std::optional<std::size_t>> read_groups(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::optional<std::size_t>> groups;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line);
    if (j.contains("group")) {
      groups.emplace_back(j["group"].get<std::size_t>());
    } else {
      groups.emplace_back();
    }
  }
  return groups;
}

int cmd_eval(const std::string& model_dir, const std::string& samples_path) {
  const typing::BpeModel bpe = typing::BpeModel::load(fs::path(model_dir) / "bpe.txt");
  model::Checkpoint ckpt = model::load_checkpoint(fs::path(model_dir) / "model.ckpt");
  const auto samples = pipeline::read_samples(samples_path);
  const auto groups = read_groups(samples_path);

  nlohmann::json report;
  bool any = false;
  if (std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.nl.has_value(); })) {
    const auto r = pipeline::evaluate_nl_to_code(ckpt.state, bpe, samples);
    report["nl_to_code"] = {{"queries", r.ranks.size()}, {"pool", r.pool_size}, {"mrr", r.mrr}, {"ranks", r.ranks}};
    any = true;
  }
  std::vector<Eigen::VectorXd> vectors;
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < samples.size() && i < groups.size(); ++i) {
    if (!groups[i]) continue;
    const auto tree = frontend::parse_source(samples[i].code);
    auto pl = typing::infer_types(tree);
    const pairs::ViewRecord code{samples[i].id, pairs::ViewKind::PL, std::move(pl.tokens), std::move(pl.labels),
                                 std::nullopt};
    vectors.push_back(model::embed(ckpt.state, pairs::assemble_single(pairs::encode_view(code, bpe), bpe).ids));
    labels.push_back(*groups[i]);
  }
  if (!vectors.empty()) {
    report["code_to_code"] = {{"items", vectors.size()}, {"map_at_r", pipeline::map_at_r_by_group(vectors, labels)}};
    any = true;
  }
  if (!any) throw std::invalid_argument("eval set has neither descriptions nor groups");
  std::cout << report.dump() << "\n";
  return kOk;
}

int cmd_grad_check(std::uint64_t seed, std::size_t count, double tolerance) {
  const auto samples = pipeline::synthetic_corpus(8, seed);
  const auto views = pipeline::sample_views(samples, seed);
  std::vector<std::vector<std::string>> corpus;
  for (const auto& sample : views) {
    for (const auto& v : sample) corpus.push_back(v.tokens);
  }
  const typing::BpeModel bpe = typing::train_bpe(corpus, 60);
  const auto pairs_ = pipeline::make_pair_source(samples, views, bpe, std::nullopt, seed)(0);
  const auto batches = pairs::make_batches(pairs_, 2, seed);
  if (batches.empty()) throw std::invalid_argument("no batch to check");
  const pairs::TrainingBatch& batch = batches.front();
  const auto masked = pairs::apply_mlm_mask(pairs::pad(batch.anchors), pairs::kDefaultMaskRate, seed);

  model::EncoderConfig config;
  config.vocab_size = bpe.vocab_size();
  config.d = 8;
  config.layers = 1;
  config.heads = 2;
  config.ff = 16;
  config.lambda = 0.01;
  config.seed = seed;
  model::ModelState state(config);

  struct Named {
    const char* name;
    model::LossTerms terms;
  };
  const Named runs[] = {{"mvcl", {true, false, false, false}},
                        {"fgti", {false, true, false, false}},
                        {"mmlm", {false, false, true, false}},
                        {"composite", {true, true, true, true}}};
  bool ok = true;
  for (const auto& run : runs) {
    const auto r = model::gradient_check(state, batch, masked, run.terms, count, derive_seed(seed, 7));
    const bool pass = r.max_rel_error <= tolerance;
    ok = ok && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << run.name << " max relative error " << r.max_rel_error << " over "
              << r.samples.size() << " parameters\n";
  }
  return ok ? kOk : kValidation;
}

int cmd_synth(std::size_t count, std::uint64_t seed, const std::string& out) {
  const auto samples = pipeline::synthetic_corpus(count, seed);
  std::ofstream f(out);
  if (!f) throw IoError("cannot write " + out);
  for (const auto& s : samples) {
    nlohmann::json j{{"id", s.id}, {"code", s.code}};
    if (s.nl) j["nl"] = *s.nl;
    f << j.dump() << "\n";
  }
  if (!f) throw IoError("failed writing " + out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-view contrastive pre-training for a Python subset"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  std::string out;
  std::string config_path;
  app.add_option("--seed", seed, "Base seed")->capture_default_str();
  app.add_option("--config", config_path, "key = value settings file");

  std::string input;
  auto* ingest = app.add_subcommand("ingest", "Parse {code, nl?} records into a view corpus");
  ingest->add_option("input", input, "Line-delimited records")->required();
  ingest->add_option("--out", out, "Output directory")->required();

  std::string nl;
  std::string id = "sample";
  auto* views = app.add_subcommand("views", "Print every view of one source file");
  views->add_option("source", input, "Program source")->required();
  views->add_option("--nl", nl, "Description");
  views->add_option("--id", id, "Sample id");
  views->add_option("--out", out, "Write records here instead of stdout");

  std::size_t variants = 3;
  auto* check = app.add_subcommand("transform-check", "Run the equivalence oracle over a program corpus");
  check->add_option("corpus", input, "Programs with inputs and reference results")->required();
  check->add_option("--variants", variants, "Seeded variants per program")->capture_default_str();

  std::size_t merges = 1000;
  auto* bpe = app.add_subcommand("bpe-train", "Learn BPE merges from a view corpus");
  bpe->add_option("views", input, "views.jsonl")->required();
  bpe->add_option("--merges", merges, "Merge budget")->capture_default_str();
  bpe->add_option("--out", out, "Model file")->required();

  auto* pre = app.add_subcommand("pretrain", "Train an encoder on an ingested corpus");
  pre->add_option("corpus", input, "Directory written by ingest")->required();
  pre->add_option("--out", out, "Model directory")->required();

  std::string samples;
  auto* eval = app.add_subcommand("eval", "Zero-shot retrieval with a trained model");
  eval->add_option("model", input, "Directory written by pretrain")->required();
  eval->add_option("samples", samples, "Eval samples {code, nl?, group?}")->required();

  std::size_t count = 200;
  double tolerance = 1e-3;
  auto* grad = app.add_subcommand("grad-check", "Compare backprop with finite differences");
  grad->add_option("--count", count, "Parameters sampled per objective")->capture_default_str();
  grad->add_option("--tolerance", tolerance, "Largest accepted relative error")->capture_default_str();

  std::size_t synth_count = 250;
  auto* synth = app.add_subcommand("synth", "Write a synthetic paired corpus");
  synth->add_option("--count", synth_count, "Samples")->capture_default_str();
  synth->add_option("--out", out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    // Read up front so a broken settings file fails every subcommand alike.
    const pipeline::Config config = load_config(config_path);
    if (*ingest) return cmd_ingest(input, out, seed);
    if (*views) return cmd_views(input, nl, id, seed, out);
    if (*check) return cmd_transform_check(input, seed, variants);
    if (*bpe) {
      if (bpe->count("--merges") == 0) merges = config.get_size("bpe.merges", merges);
      return cmd_bpe_train(input, merges, out);
    }
    if (*pre) return cmd_pretrain(input, out, config_path, seed);
    if (*eval) return cmd_eval(input, samples);
    if (*grad) return cmd_grad_check(seed, count, tolerance);
    if (*synth) return cmd_synth(synth_count, seed, out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kValidation;
}
