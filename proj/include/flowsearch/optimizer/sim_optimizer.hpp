#pragma once

#include "flowsearch/core/rng.hpp"
#include "flowsearch/exec/sim.hpp"
#include "flowsearch/optimizer/optimizer.hpp"

namespace flowsearch::opt {

struct SimOptimizerParams {
  double prediction_bias = 0.05;   // added to the true mean score
  double prediction_noise = 0.02;  // uniform in [-noise, +noise]
  double p_add = 0.60;             // edit-action mix; remainder rewrites a prompt
  double p_duplicate = 0.15;
  double p_remove = 0.15;
  int max_operators = 9;
  int fail_every = 0;  // test hook: every n-th proposal emits garbage (0 = never)
};

/// Desk-scale optimizer stand-in. Edits are sampled moves over the operator
/// list; predictions are the landscape's true mean score plus configurable
/// bias and noise. Both go through the real text envelopes (render + parse),
/// so the production parsers are on the path, and token costs are estimated
/// from the real rendered prompts.
class SimOptimizer : public Optimizer {
 public:
  SimOptimizer(exec::SimWorkflowModel model, const QuerySet& dataset,
               const OperatorCatalog& catalog, Rng rng, SimOptimizerParams params = {});

  EditProposal propose_edit(const WorkflowSpec& parent, std::span<const ExperienceEdgeView> local,
                            std::span<const GlobalScoreView> global, int next_round) override;
  PredictOutcome predict(const WorkflowSpec& w, const PredictContext& ctx) override;
  std::string name() const override { return "sim"; }

  const exec::SimWorkflowModel& model() const { return model_; }

 private:
  ParsedEdit make_edit(const WorkflowSpec& parent);

  exec::SimWorkflowModel model_;
  const QuerySet& dataset_;
  const OperatorCatalog& catalog_;
  Rng rng_;
  SimOptimizerParams params_;
  int proposals_ = 0;
};

/// Estimated token count of a prompt or completion at ~4 chars per token.
inline std::int64_t approx_tokens(const std::string& text) {
  return static_cast<std::int64_t>(text.size() / 4) + 1;
}

}  // namespace flowsearch::opt
