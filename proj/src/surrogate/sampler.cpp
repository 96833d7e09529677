#include "flowsearch/surrogate/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace flowsearch::surrogate {

std::size_t fewshot_budget(double rho, std::size_t n_queries) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must be in (0,1]");
  auto budget = static_cast<std::size_t>(
      std::ceil(rho * static_cast<double>(n_queries)));
  if (budget < 1) budget = 1;
  if (budget > n_queries)
    throw std::invalid_argument("few-shot budget exceeds query count");
  return budget;
}

std::vector<std::string> sample_fewshot_n(const DifficultyProfile& profile, double gamma,
                                          std::size_t budget, Rng& rng) {
  const std::size_t n = profile.n_queries();
  if (budget < 1) throw std::invalid_argument("few-shot budget must be >= 1");
  if (budget > n) throw std::invalid_argument("few-shot budget exceeds query count");

  // remaining members per bin (0-based bin index)
  std::vector<std::vector<std::size_t>> remaining(static_cast<std::size_t>(profile.k_bins));
  for (std::size_t i = 0; i < n; ++i) {
    remaining[static_cast<std::size_t>(profile.bin_of_query[i] - 1)].push_back(i);
  }
  const std::vector<double> base = bin_distribution(profile, gamma);

  std::vector<std::string> picked;
  picked.reserve(budget);
  std::vector<double> feasible(base.size());
  while (picked.size() < budget) {
    double mass = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) {
      feasible[k] = remaining[k].empty() ? 0.0 : base[k];
      mass += feasible[k];
    }
    for (double& v : feasible) v /= mass;

    const std::size_t k = rng.categorical(feasible);
    auto& members = remaining[k];
    const std::size_t at = rng.uniform_index(members.size());
    picked.push_back(profile.query_ids[members[at]]);
    members[at] = members.back();
    members.pop_back();
  }
  return picked;
}

std::vector<std::string> sample_fewshot(const DifficultyProfile& profile,
                                        const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  return sample_fewshot_n(profile, cfg.gamma, fewshot_budget(cfg.rho, profile.n_queries()),
                          rng);
}

}  // namespace flowsearch::surrogate
