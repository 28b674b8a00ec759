#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mvp/pairs/pairs.hpp"
#include "mvp/pairs/views.hpp"

namespace mvp::pipeline {

/// One program with its optional description.
struct Sample {
  std::string id;
  std::string code;
  std::optional<std::string> nl;
};

struct CorpusManifest {
  std::size_t paired = 0;
  std::size_t unpaired = 0;
  std::size_t parse_skips = 0;      // programs outside the supported subset
  std::size_t malformed_skips = 0;  // lines that are not valid records
  std::vector<std::string> skip_notes;
  std::map<std::string, std::size_t> view_counts;
  std::string hash;  // over every emitted view record
};

struct IngestResult {
  CorpusManifest manifest;
  std::vector<Sample> samples;  // accepted programs, code canonicalized
  std::vector<pairs::ViewRecord> records;
};

/// Reads line-delimited {code, nl?, id?} records. Programs that fail to
/// parse and malformed lines are counted and skipped.
IngestResult ingest_stream(std::istream& in, std::uint64_t seed);

/// ingest_stream on a file, writing views.jsonl, samples.jsonl and
/// manifest.json into `out_dir`. Throws std::runtime_error on I/O failure.
CorpusManifest ingest(const std::filesystem::path& input, const std::filesystem::path& out_dir, std::uint64_t seed);

std::string view_record_json(const pairs::ViewRecord& record);
pairs::ViewRecord parse_view_record(const std::string& line);
std::vector<pairs::ViewRecord> read_view_records(const std::filesystem::path& path);
void write_view_records(const std::filesystem::path& path, const std::vector<pairs::ViewRecord>& records);

std::string sample_json(const Sample& sample);
std::vector<Sample> read_samples(const std::filesystem::path& path);
void write_samples(const std::filesystem::path& path, const std::vector<Sample>& samples);

std::string manifest_json(const CorpusManifest& manifest);

/// Hash of a record stream in its on-disk form.
std::string records_hash(const std::vector<pairs::ViewRecord>& records);

}  // namespace mvp::pipeline
