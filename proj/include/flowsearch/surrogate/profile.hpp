#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowsearch/core/serde.hpp"

namespace flowsearch::surrogate {

/// Per-query warm-up difficulty: the mean score each validation query got
/// from the warm-up workflows, bucketed into K equal-width bins over [0,1].
/// Bins are numbered 1..K; bin k covers [(k-1)/K, k/K), the last closed at 1.
struct DifficultyProfile {
  int k_bins = 0;
  std::vector<std::string> query_ids;  // validation-set order
  std::vector<double> mean_scores;     // parallel to query_ids
  std::vector<int> bin_of_query;       // 1-based, parallel to query_ids
  std::vector<int> bin_counts;         // size k_bins

  std::size_t n_queries() const { return query_ids.size(); }
  std::pair<double, double> bin_interval(int k) const;

  friend bool operator==(const DifficultyProfile&, const DifficultyProfile&) = default;
};

void to_json(json& j, const DifficultyProfile& p);
void from_json(const json& j, DifficultyProfile& p);

/// Bin index (1-based) of a mean score in [0,1].
int bin_index(double mean_score, int k_bins);

/// One warm-up workflow's per-query scores: (query id, score) rows.
using PerQueryScores = std::vector<std::pair<std::string, double>>;

/// Builds the profile from M >= 1 warm-up result rows. Every workflow must
/// cover the identical query-id set; throws otherwise.
DifficultyProfile build_difficulty_profile(std::span<const PerQueryScores> warmup_results,
                                           int k_bins);

/// Softmax over bin counts: p_k = exp(gamma*n_k) / sum_j exp(gamma*n_j),
/// computed with max-subtraction so counts up to 1e6 at gamma = 1 are stable.
/// Empty bins (n_k = 0) are excluded: their probability is exactly 0 and the
/// softmax renormalizes over the occupied bins.
std::vector<double> bin_distribution(std::span<const int> counts, double gamma);
std::vector<double> bin_distribution(const DifficultyProfile& profile, double gamma);

}  // namespace flowsearch::surrogate
