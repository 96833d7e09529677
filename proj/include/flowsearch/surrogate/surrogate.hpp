#pragma once

#include "flowsearch/core/config.hpp"
#include "flowsearch/exec/executor.hpp"
#include "flowsearch/optimizer/optimizer.hpp"
#include "flowsearch/surrogate/calibrate.hpp"
#include "flowsearch/surrogate/profile.hpp"
#include "flowsearch/surrogate/sampler.hpp"

namespace flowsearch::surrogate {

struct SurrogateResult {
  CalibrationOutcome outcome;
  opt::Prediction prediction;        // raw parse; meaningful when !prediction_fallback
  std::vector<std::string> subset;   // the executed D_few
  TokenDelta predict_tokens;
  TokenDelta exec_tokens;
  int prediction_attempts = 0;
  bool prediction_fallback = false;  // parse failed after retries: s_hat = s_few, alpha = 1
  int exec_failures = 0;
};

/// The surrogate evaluation pipeline for one candidate: self-prediction via
/// the optimizer, difficulty-stratified few-shot sampling (fresh each call
/// unless `fixed_subset` pins one), few-shot execution, adaptive weight, and
/// the calibrated score. psi comes from the actual subset size.
SurrogateResult surrogate_evaluate(const WorkflowSpec& w, const DifficultyProfile& profile,
                                   const SamplerConfig& sampler_cfg,
                                   const CalibrationConfig& calibration_cfg,
                                   const QuerySet& dataset, const exec::EvaluatorSpec& evaluator,
                                   exec::Executor& executor, opt::Optimizer& optimizer,
                                   const opt::PredictContext& ctx, Rng& rng, int parallelism = 1,
                                   const std::vector<std::string>* fixed_subset = nullptr);

}  // namespace flowsearch::surrogate
