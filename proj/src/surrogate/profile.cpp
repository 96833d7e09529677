#include "flowsearch/surrogate/profile.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace flowsearch::surrogate {

std::pair<double, double> DifficultyProfile::bin_interval(int k) const {
  if (k < 1 || k > k_bins) throw std::invalid_argument("bin index out of range");
  return {static_cast<double>(k - 1) / k_bins, static_cast<double>(k) / k_bins};
}

void to_json(json& j, const DifficultyProfile& p) {
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(p.k_bins) + 1);
  for (int k = 0; k <= p.k_bins; ++k) edges.push_back(static_cast<double>(k) / p.k_bins);
  j = json{{"k_bins", p.k_bins},         {"query_ids", p.query_ids},
           {"mean_scores", p.mean_scores}, {"bin_of_query", p.bin_of_query},
           {"bin_counts", p.bin_counts},   {"bin_edges", edges}};
}

void from_json(const json& j, DifficultyProfile& p) {
  j.at("k_bins").get_to(p.k_bins);
  j.at("query_ids").get_to(p.query_ids);
  j.at("mean_scores").get_to(p.mean_scores);
  j.at("bin_of_query").get_to(p.bin_of_query);
  j.at("bin_counts").get_to(p.bin_counts);
}

int bin_index(double mean_score, int k_bins) {
  if (k_bins < 1) throw std::invalid_argument("k_bins must be >= 1");
  if (!(mean_score >= 0.0 && mean_score <= 1.0))
    throw std::invalid_argument("mean score out of [0,1]");
  int k = 1 + static_cast<int>(std::floor(mean_score * k_bins));
  return std::min(k, k_bins);  // closes the last interval at 1
}

DifficultyProfile build_difficulty_profile(std::span<const PerQueryScores> warmup_results,
                                           int k_bins) {
  if (warmup_results.empty())
    throw std::invalid_argument("difficulty profile needs at least one warm-up result");
  if (k_bins < 1) throw std::invalid_argument("k_bins must be >= 1");

  const PerQueryScores& first = warmup_results[0];
  if (first.empty()) throw std::invalid_argument("warm-up result has no per-query scores");

  std::map<std::string, double> sums;
  for (const auto& [id, score] : first) {
    if (!sums.emplace(id, score).second)
      throw std::invalid_argument("duplicate query id in warm-up result: " + id);
  }
  for (std::size_t m = 1; m < warmup_results.size(); ++m) {
    const auto& rows = warmup_results[m];
    if (rows.size() != first.size())
      throw std::invalid_argument("warm-up results cover different query sets");
    for (const auto& [id, score] : rows) {
      auto it = sums.find(id);
      if (it == sums.end())
        throw std::invalid_argument("warm-up result missing query " + id);
      it->second += score;
    }
  }

  DifficultyProfile profile;
  profile.k_bins = k_bins;
  profile.bin_counts.assign(static_cast<std::size_t>(k_bins), 0);
  const double m = static_cast<double>(warmup_results.size());
  for (const auto& [id, _] : first) {  // preserve validation-set order
    const double mean = sums.at(id) / m;
    if (!(mean >= 0.0 && mean <= 1.0))
      throw std::invalid_argument("per-query mean out of [0,1] for " + id);
    const int k = bin_index(mean, k_bins);
    profile.query_ids.push_back(id);
    profile.mean_scores.push_back(mean);
    profile.bin_of_query.push_back(k);
    profile.bin_counts[static_cast<std::size_t>(k - 1)] += 1;
  }
  return profile;
}

std::vector<double> bin_distribution(std::span<const int> counts, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (counts.empty()) throw std::invalid_argument("empty bin counts");

  int max_count = 0;
  bool any = false;
  for (int n : counts) {
    if (n < 0) throw std::invalid_argument("negative bin count");
    if (n > 0) {
      any = true;
      max_count = std::max(max_count, n);
    }
  }
  if (!any) throw std::invalid_argument("all bins are empty");

  std::vector<double> p(counts.size(), 0.0);
  double denom = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    p[k] = std::exp(gamma * static_cast<double>(counts[k] - max_count));
    denom += p[k];
  }
  for (double& v : p) v /= denom;
  return p;
}

std::vector<double> bin_distribution(const DifficultyProfile& profile, double gamma) {
  return bin_distribution(std::span<const int>(profile.bin_counts), gamma);
}

}  // namespace flowsearch::surrogate
