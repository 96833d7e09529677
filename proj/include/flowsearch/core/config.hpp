#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "flowsearch/core/types.hpp"

namespace flowsearch {

/// Parameters of the soft mixed parent-selection policy.
struct SelectionConfig {
  double lambda = 0.2;     // uniform-mixture weight, in [0,1]
  double alpha_sel = 5.0;  // softmax temperature on score gaps, > 0

  void validate() const;
  friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

/// Parameters of difficulty-stratified few-shot sampling.
struct SamplerConfig {
  int k_bins = 10;    // number of difficulty bins, >= 1
  double gamma = 0.05;  // bin-softmax temperature, > 0
  double rho = 0.02;    // few-shot budget as a fraction of the validation set, in (0,1]
  bool resample_each_round = true;  // false: one fixed subset for the whole run

  void validate() const;
  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

/// Parameters of the adaptive calibration weight.
struct CalibrationConfig {
  double tau = 0.05;      // tolerance on |pred - few|, > 0
  double alpha_max = 0.5;  // cap on the calibration weight, in (0,1]

  void validate() const;
  friend bool operator==(const CalibrationConfig&, const CalibrationConfig&) = default;
};

struct RunConfig {
  int warmup_rounds = 5;  // M: rounds evaluated by full execution
  int total_rounds = 20;  // T: all rounds; must exceed M
  SelectionConfig selection;
  SamplerConfig sampler;
  CalibrationConfig calibration;
  std::uint64_t seed = 1;

  int parallelism = 1;        // per-evaluation concurrent query executions
  int top_k = 5;              // workflows reported at the end
  int expansion_retries = 3;  // optimizer attempts per round before skipping
  int prediction_retries = 3;
  int experience_limit = 0;          // expansion-prompt experience entries, 0 = all
  int prediction_history_limit = 8;  // (round, score, prediction) records in eval prompts
  int prompt_dataset_samples = 3;    // dataset rows quoted in eval prompts
  std::string backbone_model = "generic-llm";
  std::string dataset_description;  // free text rendered into eval prompts

  std::optional<WorkflowSpec> initial_workflow;  // override for the round-1 root

  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

}  // namespace flowsearch
