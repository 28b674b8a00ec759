#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mvp::pipeline {

struct RetrievalResult {
  std::vector<std::size_t> ranks;  // 1-based rank of each query's true item
  double mrr = 0.0;
  double map_at_r = 0.0;
  std::size_t pool_size = 0;
};

double mean_reciprocal_rank(const std::vector<std::size_t>& ranks);

/// Precision averaged over the relevant hits among the first R retrieved
/// items, R being the number of relevant items. `relevant` is in rank order.
double average_precision_at_r(const std::vector<bool>& relevant, std::size_t r);

/// 1 + the number of candidates scoring strictly above the true one.
std::size_t rank_of(const Eigen::VectorXd& scores, std::size_t truth);

/// Query i's true candidate is candidate i; scores are dot products.
RetrievalResult rank_by_dot_product(const std::vector<Eigen::VectorXd>& queries,
                                    const std::vector<Eigen::VectorXd>& candidates);

/// Every vector queries all others; relevant ones share its group.
double map_at_r_by_group(const std::vector<Eigen::VectorXd>& vectors, const std::vector<std::size_t>& groups);

/// MRR when query and candidates are independent Gaussian embeddings of
/// dimension `dim`, estimated from `trials` seeded pools of `pool` candidates.
double random_baseline_mrr(std::size_t pool, std::size_t trials, std::uint64_t seed, std::size_t dim = 32);

}  // namespace mvp::pipeline
