#include "mvp/pipeline/retrieval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "mvp/util/random.hpp"

namespace mvp::pipeline {

double mean_reciprocal_rank(const std::vector<std::size_t>& ranks) {
  if (ranks.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t r : ranks) {
    if (r == 0) throw std::invalid_argument("ranks are 1-based");
    s += 1.0 / static_cast<double>(r);
  }
  return s / static_cast<double>(ranks.size());
}

double average_precision_at_r(const std::vector<bool>& relevant, std::size_t r) {
  if (r == 0) throw std::invalid_argument("query has no relevant items");
  double hits = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < std::min(r, relevant.size()); ++i) {
    if (relevant[i]) {
      hits += 1.0;
      sum += hits / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(r);
}

std::size_t rank_of(const Eigen::VectorXd& scores, std::size_t truth) {
  const double t = scores(static_cast<Eigen::Index>(truth));
  return 1 + static_cast<std::size_t>((scores.array() > t).count());
}

RetrievalResult rank_by_dot_product(const std::vector<Eigen::VectorXd>& queries,
                                    const std::vector<Eigen::VectorXd>& candidates) {
  if (queries.size() > candidates.size()) throw std::invalid_argument("a query has no true candidate in the pool");
  RetrievalResult r;
  r.pool_size = candidates.size();
  for (std::size_t q = 0; q < queries.size(); ++q) {
    Eigen::VectorXd scores(static_cast<Eigen::Index>(candidates.size()));
    for (std::size_t c = 0; c < candidates.size(); ++c) scores(static_cast<Eigen::Index>(c)) = queries[q].dot(candidates[c]);
    r.ranks.push_back(rank_of(scores, q));
  }
  r.mrr = mean_reciprocal_rank(r.ranks);
  return r;
}

double map_at_r_by_group(const std::vector<Eigen::VectorXd>& vectors, const std::vector<std::size_t>& groups) {
  double total = 0.0;
  std::size_t queries = 0;
  for (std::size_t q = 0; q < vectors.size(); ++q) {
    std::vector<std::size_t> others;
    for (std::size_t c = 0; c < vectors.size(); ++c) {
      if (c != q) others.push_back(c);
    }
    const auto r = static_cast<std::size_t>(std::count_if(others.begin(), others.end(), [&](std::size_t c) { return groups[c] == groups[q]; }));
    if (r == 0) continue;
    // Stable sort keeps ties in index order.
    std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
      return vectors[q].dot(vectors[a]) > vectors[q].dot(vectors[b]);
    });
    std::vector<bool> relevant;
    for (std::size_t c : others) relevant.push_back(groups[c] == groups[q]);
    total += average_precision_at_r(relevant, r);
    ++queries;
  }
  return queries == 0 ? 0.0 : total / static_cast<double>(queries);
}

double random_baseline_mrr(std::size_t pool, std::size_t trials, std::uint64_t seed, std::size_t dim) {
  Rng rng(seed);
  auto gaussian = [&] {
    Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
    return v;
  };
  std::vector<std::size_t> ranks;
  for (std::size_t t = 0; t < trials; ++t) {
    const Eigen::VectorXd q = gaussian();
    Eigen::VectorXd scores(static_cast<Eigen::Index>(pool));
    for (Eigen::Index c = 0; c < scores.size(); ++c) scores(c) = q.dot(gaussian());
    ranks.push_back(rank_of(scores, 0));
  }
  return mean_reciprocal_rank(ranks);
}

}  // namespace mvp::pipeline
