#include "mvp/pipeline/synthetic.hpp"

#include <set>
#include <string>
#include <string_view>

#include "mvp/util/random.hpp"

namespace mvp::pipeline {

namespace {

struct Template {
  std::vector<std::string_view> verbs;
  std::string_view nl;    // placeholders: {verb} {noun} {lim} {res}
  std::string_view code;
};

const std::vector<Template>& templates() {
  static const std::vector<Template> t = {
      {{"sum", "accumulate", "add"},
       "{verb} the {noun} above {lim} into {res}",
       "def {verb}({noun}, {lim}):\n    {res} = 0\n    for item in {noun}:\n        if item > {lim}:\n"
       "            {res} = {res} + item\n    return {res}\n"},
      {{"count", "tally", "number"},
       "{verb} how many {noun} are below {lim} as {res}",
       "def {verb}({noun}, {lim}):\n    {res} = 0\n    for item in {noun}:\n        if item < {lim}:\n"
       "            {res} += 1\n    return {res}\n"},
      {{"largest", "maximum", "peak"},
       "{verb} of the {noun} starting from {lim} kept in {res}",
       "def {verb}({noun}, {lim}):\n    {res} = {lim}\n    for item in {noun}:\n        if item > {res}:\n"
       "            {res} = item\n    return {res}\n"},
      {{"scale", "stretch", "multiply"},
       "{verb} each of the {noun} by {lim} collecting {res}",
       "def {verb}({noun}, {lim}):\n    {res} = []\n    for i in range(len({noun})):\n"
       "        {res}.append({noun}[i] * {lim})\n    return {res}\n"},
      {{"prefix", "head", "leading"},
       "{verb} sum of the first {lim} {noun} stored in {res}",
       "def {verb}({noun}, {lim}):\n    {res} = 0\n    i = 0\n    while i < {lim}:\n"
       "        {res} = {res} + {noun}[i]\n        i += 1\n    return {res}\n"},
      {{"product", "combine", "fold"},
       "{verb} all {noun} together then add {lim} to {res}",
       "def {verb}({noun}, {lim}):\n    {res} = 1\n    for item in {noun}:\n        {res} = {res} * item\n"
       "    return {res} + {lim}\n"},
  };
  return t;
}

constexpr std::string_view kNouns[] = {
    "apples", "scores",  "prices",  "weights", "heights", "ages",    "votes",   "points",  "coins",  "miles",
    "grades", "sales",   "clicks",  "errors",  "visits",  "orders",  "tokens",  "pixels",  "frames", "bytes",
    "trees",  "rivers",  "stones",  "planets", "birds",   "seeds",   "lamps",   "chairs",  "books",  "songs",
    "ships",  "tickets", "candles", "shells",  "melons",  "bricks",  "cables",  "rockets", "lemons", "pearls"};

constexpr std::string_view kLimits[] = {"limit",  "bound", "cutoff", "margin", "factor", "step",  "level",
                                        "gauge",  "quota", "ceiling", "base",  "offset", "target", "scale_by",
                                        "minimum", "edge", "budget",  "mark",  "rate",  "weight_cap"};

constexpr std::string_view kResults[] = {"total", "result", "acc",    "answer", "outcome", "tally_out", "best",
                                         "value", "summary", "output", "running", "final", "collected", "current",
                                         "score_out", "reading", "measure", "store", "keep", "record"};

std::string fill(std::string_view pattern, std::string_view verb, std::string_view noun, std::string_view lim,
                 std::string_view res) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '{') {
      const std::size_t close = pattern.find('}', i);
      const std::string_view key = pattern.substr(i + 1, close - i - 1);
      out += key == "verb" ? verb : key == "noun" ? noun : key == "lim" ? lim : res;
      i = close;
    } else {
      out += pattern[i];
    }
  }
  return out;
}

}  // namespace

std::vector<Sample> synthetic_corpus(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Sample> out;
  std::set<std::string> seen;
  while (out.size() < count) {
    const Template& t = templates()[rng.uniform(templates().size())];
    const std::string_view verb = t.verbs[rng.uniform(t.verbs.size())];
    const std::string_view noun = kNouns[rng.uniform(std::size(kNouns))];
    const std::string_view lim = kLimits[rng.uniform(std::size(kLimits))];
    const std::string_view res = kResults[rng.uniform(std::size(kResults))];
    std::string code = fill(t.code, verb, noun, lim, res);
    if (!seen.insert(code).second) continue;
    out.push_back({"syn" + std::to_string(out.size()), std::move(code), fill(t.nl, verb, noun, lim, res)});
  }
  return out;
}

}  // namespace mvp::pipeline
