#include "mvp/typing/bpe.hpp"
#include "mvp/util/error.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mvp::typing {

namespace {

constexpr std::string_view kHeader = "mvp-bpe 1";

std::size_t code_point_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;  // stray continuation byte: keep it as its own symbol
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case ' ': out += "\\s"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    switch (s[++i]) {
      case 's': out += ' '; break;
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      default: out += s[i];
    }
  }
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string f;
  while (in >> f) out.push_back(unescape(f));
  return out;
}

// Applies one merge everywhere in a symbol sequence.
void apply_merge(std::vector<std::string>& word, const BpeModel::Merge& m) {
  std::vector<std::string> out;
  out.reserve(word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i + 1 < word.size() && word[i] == m.first && word[i + 1] == m.second) {
      out.push_back(word[i] + word[i + 1]);
      ++i;
    } else {
      out.push_back(std::move(word[i]));
    }
  }
  word = std::move(out);
}

}  // namespace

bool is_special_token(std::string_view token) {
  return std::find(std::begin(kSpecialTokens), std::end(kSpecialTokens), token) != std::end(kSpecialTokens);
}

std::vector<std::string> word_symbols(std::string_view word) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < word.size();) {
    const std::size_t n = std::min(code_point_length(static_cast<unsigned char>(word[i])), word.size() - i);
    out.emplace_back(word.substr(i, n));
    i += n;
  }
  if (!out.empty()) out.back() += kEndOfWord;
  return out;
}

BpeModel::BpeModel(std::vector<std::string> alphabet, std::vector<Merge> merges)
    : alphabet_(std::move(alphabet)), merges_(std::move(merges)) {
  rebuild();
}

void BpeModel::rebuild() {
  rank_.clear();
  symbols_.clear();
  index_.clear();
  auto add = [&](const std::string& s) {
    if (index_.emplace(s, static_cast<std::int32_t>(symbols_.size())).second) symbols_.push_back(s);
  };
  for (std::string_view s : kSpecialTokens) add(std::string(s));
  for (const std::string& c : alphabet_) {
    add(c);
    add(c + std::string(kEndOfWord));
  }
  for (std::size_t i = 0; i < merges_.size(); ++i) {
    rank_.emplace(merges_[i], i);
    add(merges_[i].first + merges_[i].second);
  }
}

std::vector<std::string> BpeModel::encode(std::string_view token) const {
  if (is_special_token(token)) return {std::string(token)};
  std::vector<std::string> word = word_symbols(token);
  // Lowest-rank pair first, as in training order.
  while (word.size() > 1) {
    std::size_t best = merges_.size();
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      const auto it = rank_.find({word[i], word[i + 1]});
      if (it != rank_.end()) best = std::min(best, it->second);
    }
    if (best == merges_.size()) break;
    apply_merge(word, merges_[best]);
  }
  return word;
}

std::vector<std::string> BpeModel::encode(const std::vector<std::string>& tokens) const {
  std::vector<std::string> out;
  for (const std::string& t : tokens) {
    auto sub = encode(t);
    out.insert(out.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
  }
  return out;
}

std::int32_t BpeModel::id(std::string_view symbol) const {
  const auto it = index_.find(symbol);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& BpeModel::symbol(std::int32_t id) const { return symbols_.at(static_cast<std::size_t>(id)); }

std::vector<std::int32_t> BpeModel::ids(const std::vector<std::string>& subtokens) const {
  std::vector<std::int32_t> out;
  out.reserve(subtokens.size());
  for (const std::string& s : subtokens) out.push_back(id(s));
  return out;
}

std::string BpeModel::serialize() const {
  std::ostringstream out;
  out << kHeader << "\n";
  out << "specials";
  for (std::string_view s : kSpecialTokens) out << ' ' << escape(s);
  out << "\nalphabet";
  for (const std::string& c : alphabet_) out << ' ' << escape(c);
  out << "\nmerges " << merges_.size() << "\n";
  for (const Merge& m : merges_) out << escape(m.first) << ' ' << escape(m.second) << "\n";
  return out.str();
}

BpeModel BpeModel::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw std::runtime_error("not a BPE model file");
  std::vector<std::string> alphabet;
  std::vector<Merge> merges;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    const std::vector<std::string> f = fields(line);
    if (f.empty()) continue;
    if (f[0] == "specials") {
      if (!std::equal(f.begin() + 1, f.end(), std::begin(kSpecialTokens), std::end(kSpecialTokens))) {
        throw std::runtime_error("BPE model has different special tokens");
      }
    } else if (f[0] == "alphabet") {
      alphabet.assign(f.begin() + 1, f.end());
    } else if (f[0] == "merges" && f.size() == 2 && merges.empty()) {
      expected = std::stoul(f[1]);
      for (std::size_t i = 0; i < expected; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("truncated BPE merge list");
        const std::vector<std::string> m = fields(line);
        if (m.size() != 2) throw std::runtime_error("malformed BPE merge line: " + line);
        merges.emplace_back(m[0], m[1]);
      }
    }
  }
  return BpeModel(std::move(alphabet), std::move(merges));
}

void BpeModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << serialize();
}

BpeModel BpeModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

BpeModel train_bpe(const std::vector<std::vector<std::string>>& corpus, std::size_t merges) {
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : corpus) {
    for (const std::string& t : seq) {
      if (!t.empty() && !is_special_token(t)) ++counts[t];
    }
  }
  std::vector<std::pair<std::vector<std::string>, std::size_t>> words;
  std::set<std::string> alphabet;
  for (const auto& [w, n] : counts) {
    for (std::string s : word_symbols(w)) {
      if (s.ends_with(kEndOfWord)) s.resize(s.size() - kEndOfWord.size());
      alphabet.insert(s);
    }
    words.emplace_back(word_symbols(w), n);
  }

  std::vector<BpeModel::Merge> learned;
  for (std::size_t step = 0; step < merges; ++step) {
    std::map<BpeModel::Merge, std::size_t> pairs;
    for (const auto& [word, n] : words) {
      for (std::size_t i = 0; i + 1 < word.size(); ++i) pairs[{word[i], word[i + 1]}] += n;
    }
    if (pairs.empty()) break;
    // std::map iterates in lexicographic order, so the first maximum wins ties.
    auto best = pairs.begin();
    for (auto it = pairs.begin(); it != pairs.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    learned.push_back(best->first);
    for (auto& entry : words) apply_merge(entry.first, best->first);
  }
  return BpeModel({alphabet.begin(), alphabet.end()}, std::move(learned));
}

std::vector<std::string> detokenize(const std::vector<std::string>& subtokens) {
  std::vector<std::string> out;
  std::string current;
  for (const std::string& s : subtokens) {
    if (is_special_token(s)) {
      if (!current.empty()) out.push_back(std::exchange(current, {}));
      out.push_back(s);
      continue;
    }
    current += s;
    if (current.ends_with(kEndOfWord)) {
      current.resize(current.size() - kEndOfWord.size());
      out.push_back(std::exchange(current, {}));
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

TypedSubtokens encode_with_types(const TypedTokenSequence& seq, const BpeModel& bpe) {
  TypedSubtokens out;
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    std::vector<std::string> sub = bpe.encode(seq.tokens[i]);
    out.labels.insert(out.labels.end(), sub.size(), seq.labels[i]);
    out.subtokens.insert(out.subtokens.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
  }
  return out;
}

}  // namespace mvp::typing
