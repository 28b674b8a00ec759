#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace mvp::pipeline {

/// Flat `key = value` settings with dotted key namespaces (model.d,
/// train.batch_n, bpe.merges, mask.rate, loss.lambda, ...). `#` starts a
/// comment; later assignments override earlier ones.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  bool has(const std::string& key) const { return values_.contains(key); }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace mvp::pipeline
