#include "mvp/pipeline/corpus.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mvp/frontend/parser.hpp"
#include "mvp/util/hash.hpp"
#include "mvp/util/random.hpp"
#include "mvp/util/error.hpp"

namespace mvp::pipeline {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

}  // namespace

std::string view_record_json(const pairs::ViewRecord& r) {
  json j;
  j["id"] = r.sample_id;
  j["view"] = pairs::view_name(r.view);
  j["tokens"] = r.tokens;
  std::vector<std::string> labels;
  labels.reserve(r.labels.size());
  for (typing::TypeLabel l : r.labels) labels.emplace_back(typing::type_label_name(l));
  j["labels"] = labels;
  if (r.seed) j["seed"] = *r.seed;
  return j.dump();
}

pairs::ViewRecord parse_view_record(const std::string& line) {
  const json j = json::parse(line);
  pairs::ViewRecord r;
  r.sample_id = j.at("id").get<std::string>();
  const auto view = pairs::parse_view(j.at("view").get<std::string>());
  if (!view) throw std::invalid_argument("unknown view " + j.at("view").dump());
  r.view = *view;
  r.tokens = j.at("tokens").get<std::vector<std::string>>();
  for (const std::string& l : j.at("labels").get<std::vector<std::string>>()) {
    const auto label = typing::parse_type_label(l);
    if (!label) throw std::invalid_argument("unknown type label " + l);
    r.labels.push_back(*label);
  }
  if (r.labels.size() != r.tokens.size()) throw std::invalid_argument("labels and tokens differ in length");
  if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

std::vector<pairs::ViewRecord> read_view_records(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<pairs::ViewRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_view_record(line));
  }
  return out;
}

void write_view_records(const std::filesystem::path& path, const std::vector<pairs::ViewRecord>& records) {
  std::ofstream out = open_out(path);
  for (const auto& r : records) out << view_record_json(r) << "\n";
}

std::string sample_json(const Sample& s) {
  json j{{"id", s.id}, {"code", s.code}};
  if (s.nl) j["nl"] = *s.nl;
  return j.dump();
}

std::vector<Sample> read_samples(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<Sample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    Sample s{j.at("id").get<std::string>(), j.at("code").get<std::string>(), std::nullopt};
    if (j.contains("nl") && j.at("nl").is_string()) s.nl = j.at("nl").get<std::string>();
    out.push_back(std::move(s));
  }
  return out;
}

void write_samples(const std::filesystem::path& path, const std::vector<Sample>& samples) {
  std::ofstream out = open_out(path);
  for (const auto& s : samples) out << sample_json(s) << "\n";
}

std::string records_hash(const std::vector<pairs::ViewRecord>& records) {
  ContentHash h;
  for (const auto& r : records) {
    h.update(view_record_json(r));
    h.update("\n");
  }
  return h.hex();
}

std::string manifest_json(const CorpusManifest& m) {
  json j{{"paired", m.paired},         {"unpaired", m.unpaired},       {"parse_skips", m.parse_skips},
         {"malformed_skips", m.malformed_skips}, {"skip_notes", m.skip_notes}, {"view_counts", m.view_counts},
         {"hash", m.hash}};
  return j.dump(2);
}

IngestResult ingest_stream(std::istream& in, std::uint64_t seed) {
  IngestResult result;
  CorpusManifest& m = result.manifest;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Sample sample;
    try {
      const json j = json::parse(line);
      sample.code = j.at("code").get<std::string>();
      if (j.contains("nl") && !j.at("nl").is_null()) sample.nl = j.at("nl").get<std::string>();
      sample.id = j.contains("id") ? j.at("id").get<std::string>() : "line" + std::to_string(number);
    } catch (const std::exception&) {
      ++m.malformed_skips;
      m.skip_notes.push_back("line " + std::to_string(number) + ": malformed record");
      continue;
    }
    frontend::SyntaxTree tree;
    try {
      tree = frontend::parse_source(sample.code);
    } catch (const frontend::ParseError& e) {
      ++m.parse_skips;
      m.skip_notes.push_back("line " + std::to_string(number) + ": " + e.what());
      continue;
    }
    if (sample.nl && pairs::nl_words(*sample.nl).empty()) sample.nl.reset();
    sample.code = frontend::unparse(tree);
    std::vector<pairs::ViewRecord> views =
        pairs::extract_views(tree, sample.id, sample.nl, derive_seed(seed, number));
    (sample.nl ? m.paired : m.unpaired) += 1;
    for (auto& v : views) {
      ++m.view_counts[std::string(pairs::view_name(v.view))];
      result.records.push_back(std::move(v));
    }
    result.samples.push_back(std::move(sample));
  }
  m.hash = records_hash(result.records);
  return result;
}

CorpusManifest ingest(const std::filesystem::path& input, const std::filesystem::path& out_dir, std::uint64_t seed) {
  std::ifstream in = open_in(input);
  IngestResult r = ingest_stream(in, seed);
  std::filesystem::create_directories(out_dir);
  write_view_records(out_dir / "views.jsonl", r.records);
  write_samples(out_dir / "samples.jsonl", r.samples);
  std::ofstream manifest = open_out(out_dir / "manifest.json");
  manifest << manifest_json(r.manifest) << "\n";
  return r.manifest;
}

}  // namespace mvp::pipeline
