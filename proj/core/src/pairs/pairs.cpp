#include "mvp/pairs/pairs.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "mvp/util/random.hpp"

namespace mvp::pairs {

using typing::TypeLabel;

namespace {

void append(InputSequence& seq, const ViewRecord& rec, std::size_t limit, const typing::BpeModel& bpe) {
  const std::size_t n = std::min(limit, rec.tokens.size());
  for (std::size_t i = 0; i < n; ++i) {
    seq.ids.push_back(bpe.id(rec.tokens[i]));
    seq.labels.push_back(rec.labels.empty() ? TypeLabel::O : rec.labels[i]);
  }
}

void push_special(InputSequence& seq, std::int32_t id) {
  seq.ids.push_back(id);
  seq.labels.push_back(TypeLabel::O);
}

const ViewRecord& find_view(const std::vector<ViewRecord>& views, ViewKind v) {
  for (const ViewRecord& r : views) {
    if (r.view == v) return r;
  }
  throw std::invalid_argument("sample is missing the " + std::string(view_name(v)) + " view");
}

}  // namespace

InputSequence assemble_single(const ViewRecord& record, const typing::BpeModel& bpe) {
  if (record.tokens.empty()) {
    throw std::invalid_argument("empty " + std::string(view_name(record.view)) + " record for " + record.sample_id);
  }
  InputSequence seq{record.sample_id, Form::Single, record.view, std::nullopt, {}, {}};
  push_special(seq, typing::kCls);
  append(seq, record, kMaxSingleLength - 1, bpe);
  return seq;
}

InputSequence assemble_dual(const ViewRecord& nl, const ViewRecord& record, const typing::BpeModel& bpe) {
  if (nl.view != ViewKind::NL || record.view == ViewKind::NL) {
    throw std::invalid_argument("dual input needs an NL view and a code view");
  }
  if (nl.sample_id != record.sample_id) {
    throw std::invalid_argument("dual input mixes samples " + nl.sample_id + " and " + record.sample_id);
  }
  InputSequence seq{nl.sample_id, Form::Dual, ViewKind::NL, record.view, {}, {}};
  push_special(seq, typing::kCls);
  append(seq, nl, kMaxNlLength, bpe);
  push_special(seq, typing::kSep);
  append(seq, record, kMaxSecondLength, bpe);
  return seq;
}

std::string PairCombo::name() const {
  if (dual) return "NL+PL|NL+" + std::string(view_name(b));
  return std::string(view_name(a)) + "|" + std::string(view_name(b));
}

bool PairCombo::uses(ViewKind v) const { return a == v || b == v || (dual && (v == ViewKind::NL || v == ViewKind::PL)); }

const std::vector<PairCombo>& all_combos() {
  static const std::vector<PairCombo> combos = {
      {false, ViewKind::NL, ViewKind::PL},  {false, ViewKind::NL, ViewKind::PT}, {false, ViewKind::PL, ViewKind::AST},
      {false, ViewKind::PL, ViewKind::CFG}, {false, ViewKind::PL, ViewKind::PT}, {true, ViewKind::PL, ViewKind::AST},
      {true, ViewKind::PL, ViewKind::CFG},  {true, ViewKind::PL, ViewKind::PT},
  };
  return combos;
}

std::vector<PositivePair> make_positive_pairs(const std::vector<ViewRecord>& views, bool paired,
                                              const typing::BpeModel& bpe, std::optional<ViewKind> drop) {
  std::vector<PositivePair> out;
  const auto& combos = all_combos();
  for (std::size_t c = 0; c < combos.size(); ++c) {
    const PairCombo& combo = combos[c];
    if (!paired && combo.uses(ViewKind::NL)) continue;
    if (drop && combo.uses(*drop)) continue;
    if (combo.dual) {
      const ViewRecord& nl = find_view(views, ViewKind::NL);
      out.push_back({c, assemble_dual(nl, find_view(views, ViewKind::PL), bpe),
                     assemble_dual(nl, find_view(views, combo.b), bpe)});
    } else {
      out.push_back({c, assemble_single(find_view(views, combo.a), bpe),
                     assemble_single(find_view(views, combo.b), bpe)});
    }
  }
  return out;
}

std::vector<TrainingBatch> make_batches(std::vector<PositivePair> pairs, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("batch size must be at least 2");
  Rng rng(seed);
  rng.shuffle(std::span(pairs));

  std::map<std::size_t, std::vector<PositivePair*>> by_combo;
  for (PositivePair& p : pairs) by_combo[p.combo].push_back(&p);

  std::vector<TrainingBatch> out;
  for (auto& [combo, members] : by_combo) {
    // Pairs whose sample already sits in the open batch wait for a later one.
    std::vector<PositivePair*> pending = members;
    while (pending.size() >= n) {
      TrainingBatch batch{combo, {}, {}};
      std::set<std::string> ids;
      std::vector<PositivePair*> rest;
      for (PositivePair* p : pending) {
        if (batch.size() < n && ids.insert(p->anchor.sample_id).second) {
          batch.anchors.push_back(std::move(p->anchor));
          batch.positives.push_back(std::move(p->positive));
        } else {
          rest.push_back(p);
        }
      }
      if (batch.size() < n) break;
      out.push_back(std::move(batch));
      pending = std::move(rest);
    }
  }
  rng.shuffle(std::span(out));
  return out;
}

NegativeSet negatives(const TrainingBatch& batch, std::size_t i, Direction) {
  // Indices are the same for both directions; only which side is "own" flips.
  NegativeSet set;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    if (j == i) continue;
    set.intra.push_back(j);
    set.inter.push_back(j);
  }
  return set;
}

TokenMatrix pad(const std::vector<InputSequence>& inputs) {
  TokenMatrix m;
  m.rows = inputs.size();
  for (const InputSequence& s : inputs) m.cols = std::max(m.cols, s.ids.size());
  m.ids.assign(m.rows * m.cols, typing::kPad);
  m.labels.assign(m.rows * m.cols, TypeLabel::O);
  for (std::size_t r = 0; r < m.rows; ++r) {
    std::copy(inputs[r].ids.begin(), inputs[r].ids.end(), m.ids.begin() + static_cast<std::ptrdiff_t>(r * m.cols));
    std::copy(inputs[r].labels.begin(), inputs[r].labels.end(),
              m.labels.begin() + static_cast<std::ptrdiff_t>(r * m.cols));
  }
  return m;
}

MaskedBatch apply_mlm_mask(const TokenMatrix& tokens, double rate, std::uint64_t seed) {
  if (!(rate > 0.0 && rate < 1.0)) throw std::invalid_argument("mask rate must lie in (0, 1)");
  MaskedBatch out{tokens, {}, {}};
  Rng rng(seed);
  for (std::size_t i = 0; i < tokens.ids.size(); ++i) {
    if (tokens.ids[i] < static_cast<std::int32_t>(typing::kSpecialCount)) continue;
    if (rng.bernoulli(rate)) {
      out.positions.push_back(i);
      out.originals.push_back(tokens.ids[i]);
      out.tokens.ids[i] = typing::kMask;
    }
  }
  return out;
}

}  // namespace mvp::pairs
