#include "flowsearch/surrogate/surrogate.hpp"

#include <stdexcept>

namespace flowsearch::surrogate {

SurrogateResult surrogate_evaluate(const WorkflowSpec& w, const DifficultyProfile& profile,
                                   const SamplerConfig& sampler_cfg,
                                   const CalibrationConfig& calibration_cfg,
                                   const QuerySet& dataset, const exec::EvaluatorSpec& evaluator,
                                   exec::Executor& executor, opt::Optimizer& optimizer,
                                   const opt::PredictContext& ctx, Rng& rng, int parallelism,
                                   const std::vector<std::string>* fixed_subset) {
  sampler_cfg.validate();
  calibration_cfg.validate();
  if (profile.n_queries() != dataset.size())
    throw std::invalid_argument("difficulty profile does not match the validation set");

  SurrogateResult result;

  opt::PredictOutcome predicted = optimizer.predict(w, ctx);
  result.predict_tokens = predicted.tokens;
  result.prediction_attempts = predicted.attempts;

  if (fixed_subset != nullptr) {
    result.subset = *fixed_subset;
  } else {
    result.subset = sample_fewshot(profile, sampler_cfg, rng);
  }
  if (result.subset.empty()) throw std::invalid_argument("few-shot subset is empty");

  exec::EvalOutcome few = exec::evaluate_subset(executor, w, dataset, result.subset, evaluator,
                                                parallelism);
  result.exec_tokens = few.tokens;
  result.exec_failures = few.failures;

  const double psi =
      static_cast<double>(result.subset.size()) / static_cast<double>(dataset.size());

  if (!predicted.ok) {
    // prediction unusable after retries: trust the few-shot score outright
    result.prediction_fallback = true;
    result.outcome.s_pred = few.mean_score;
    result.outcome.s_few = few.mean_score;
    result.outcome.epsilon = 0.0;
    result.outcome.psi = psi;
    result.outcome.alpha = 1.0;
    result.outcome.s_hat = few.mean_score;
    result.outcome.fallback = true;
    return result;
  }

  result.prediction = predicted.prediction;
  result.outcome = calibrate(predicted.prediction.value, few.mean_score, psi,
                             calibration_cfg.tau, calibration_cfg.alpha_max);
  return result;
}

}  // namespace flowsearch::surrogate
