#include "flowsearch/core/config.hpp"

#include <stdexcept>

namespace flowsearch {

namespace {

void fail(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config: " + key + " " + what);
}

}  // namespace

void SelectionConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("selection.lambda", "must be in [0,1]");
  if (!(alpha_sel > 0.0)) fail("selection.alpha_sel", "must be > 0");
}

void SamplerConfig::validate() const {
  if (k_bins < 1) fail("sampler.k_bins", "must be >= 1");
  if (!(gamma > 0.0)) fail("sampler.gamma", "must be > 0");
  if (!(rho > 0.0 && rho <= 1.0)) fail("sampler.rho", "must be in (0,1]");
}

void CalibrationConfig::validate() const {
  if (!(tau > 0.0)) fail("calibration.tau", "must be > 0");
  if (!(alpha_max > 0.0 && alpha_max <= 1.0)) fail("calibration.alpha_max", "must be in (0,1]");
}

void RunConfig::validate() const {
  if (warmup_rounds < 1) fail("run.warmup_rounds", "must be >= 1");
  if (total_rounds <= warmup_rounds) fail("run.total_rounds", "must exceed run.warmup_rounds");
  if (parallelism < 1) fail("run.parallelism", "must be >= 1");
  if (top_k < 1) fail("run.top_k", "must be >= 1");
  if (expansion_retries < 1) fail("run.expansion_retries", "must be >= 1");
  if (prediction_retries < 1) fail("run.prediction_retries", "must be >= 1");
  if (experience_limit < 0) fail("run.experience_limit", "must be >= 0");
  if (prediction_history_limit < 0) fail("run.prediction_history_limit", "must be >= 0");
  if (prompt_dataset_samples < 0) fail("run.prompt_dataset_samples", "must be >= 0");
  selection.validate();
  sampler.validate();
  calibration.validate();
}

}  // namespace flowsearch
