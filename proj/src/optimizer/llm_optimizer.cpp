#include "flowsearch/optimizer/optimizer.hpp"

namespace flowsearch::opt {

LlmResponse ChatLlmCaller::complete(const std::string& prompt) {
  exec::ChatResult r = client_.complete({{"user", prompt}});
  return LlmResponse{r.ok, r.content, r.tokens, r.error};
}

PredictOutcome self_predict(const WorkflowSpec& w, const PredictContext& ctx, LlmCaller& caller,
                            const Template& tmpl, int retries) {
  PromptBundle bundle = build_eval_prompt(w, ctx, tmpl);
  PredictOutcome out;
  for (int attempt = 1; attempt <= retries; ++attempt) {
    out.attempts = attempt;
    LlmResponse response = caller.complete(bundle.text);
    out.tokens += response.tokens;
    if (!response.ok) {
      out.error = response.error;
      continue;
    }
    std::string parse_error;
    if (auto prediction = parse_prediction(response.text, &parse_error)) {
      out.ok = true;
      out.prediction = std::move(*prediction);
      out.error.clear();
      return out;
    }
    out.error = parse_error;
  }
  return out;
}

LlmOptimizer::LlmOptimizer(LlmCaller& caller, const OperatorCatalog& catalog,
                           LlmOptimizerOptions options)
    : caller_(caller), catalog_(catalog), options_(std::move(options)) {}

EditProposal LlmOptimizer::propose_edit(const WorkflowSpec& parent,
                                        std::span<const ExperienceEdgeView> local,
                                        std::span<const GlobalScoreView> global, int next_round) {
  PromptBundle bundle = build_optimizer_prompt(parent, local, global, next_round, catalog_,
                                               options_.optimize_template,
                                               options_.experience_limit);
  EditProposal out;
  for (int attempt = 1; attempt <= options_.expansion_retries; ++attempt) {
    out.attempts = attempt;
    LlmResponse response = caller_.complete(bundle.text);
    out.tokens += response.tokens;
    if (!response.ok) {
      out.error = response.error;
      continue;
    }
    std::string parse_error;
    auto edit = parse_workflow_edit(response.text, &parse_error);
    if (!edit) {
      out.error = parse_error;
      continue;
    }
    WorkflowSpec draft;
    draft.round = next_round;
    draft.parent_id = parent.id;
    draft.operators = edit->operators;
    draft.prompts = edit->prompts;
    draft.body = edit->body;
    ValidationReport report = validate_workflow(draft, catalog_);
    if (!report.ok()) {
      out.error = "invalid workflow: " + report.summary();
      continue;
    }
    out.ok = true;
    out.draft = std::move(draft);
    out.delta = edit->delta;
    out.delta_defaulted = edit->delta_defaulted;
    out.error.clear();
    return out;
  }
  return out;
}

PredictOutcome LlmOptimizer::predict(const WorkflowSpec& w, const PredictContext& ctx) {
  return self_predict(w, ctx, caller_, options_.eval_template, options_.prediction_retries);
}

}  // namespace flowsearch::opt
