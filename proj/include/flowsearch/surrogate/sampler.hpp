#pragma once

#include "flowsearch/core/config.hpp"
#include "flowsearch/core/rng.hpp"
#include "flowsearch/surrogate/profile.hpp"

namespace flowsearch::surrogate {

/// Few-shot budget: ceil(rho * n), clamped into [1, n].
std::size_t fewshot_budget(double rho, std::size_t n_queries);

/// Draws `budget` distinct query ids: each draw samples a bin from the
/// count-softmax distribution (restricted to bins with queries remaining,
/// renormalized), then a query uniformly from that bin's remaining members.
/// Deterministic under the rng seed.
std::vector<std::string> sample_fewshot_n(const DifficultyProfile& profile, double gamma,
                                          std::size_t budget, Rng& rng);

/// Budget from cfg.rho; throws if the budget exceeds the query count.
std::vector<std::string> sample_fewshot(const DifficultyProfile& profile,
                                        const SamplerConfig& cfg, Rng& rng);

}  // namespace flowsearch::surrogate
