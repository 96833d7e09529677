#include "flowsearch/optimizer/sim_optimizer.hpp"

#include <algorithm>

namespace flowsearch::opt {

SimOptimizer::SimOptimizer(exec::SimWorkflowModel model, const QuerySet& dataset,
                           const OperatorCatalog& catalog, Rng rng, SimOptimizerParams params)
    : model_(std::move(model)), dataset_(dataset), catalog_(catalog), rng_(rng),
      params_(params) {}

ParsedEdit SimOptimizer::make_edit(const WorkflowSpec& parent) {
  ParsedEdit edit;
  edit.operators = parent.operators;
  edit.prompts = parent.prompts;

  const auto& entries = catalog_.entries();
  const double action = rng_.uniform();
  const bool can_grow = static_cast<int>(edit.operators.size()) < params_.max_operators;

  if (action < params_.p_add && can_grow) {
    // prefer an operator type the workflow does not use yet
    std::vector<const OperatorInfo*> unused;
    for (const auto& info : entries) {
      bool present = std::any_of(edit.operators.begin(), edit.operators.end(),
                                 [&](const OperatorCall& c) { return c.name == info.name; });
      if (!present) unused.push_back(&info);
    }
    const OperatorInfo* pick = unused.empty()
                                   ? &entries[rng_.uniform_index(entries.size())]
                                   : unused[rng_.uniform_index(unused.size())];
    OperatorCall call{pick->name, {}};
    if ((pick->name == "Custom" || pick->name == "CustomCodeGenerate") && rng_.uniform() < 0.5) {
      std::string prompt_name = "STEP_" + std::to_string(edit.operators.size() + 1) + "_PROMPT";
      call.params["instruction"] = "prompt_custom." + prompt_name;
      edit.prompts[prompt_name] =
          "Carefully refine the intermediate result before answering.";
    }
    std::size_t at = rng_.uniform_index(edit.operators.size() + 1);
    edit.operators.insert(edit.operators.begin() + static_cast<std::ptrdiff_t>(at), call);
    edit.delta = "add " + pick->name + " at position " + std::to_string(at + 1);
  } else if (action < params_.p_add + params_.p_duplicate && can_grow &&
             !edit.operators.empty()) {
    std::size_t at = rng_.uniform_index(edit.operators.size());
    OperatorCall copy = edit.operators[at];
    edit.operators.insert(edit.operators.begin() + static_cast<std::ptrdiff_t>(at), copy);
    edit.delta = "duplicate " + copy.name + " at position " + std::to_string(at + 1);
  } else if (action < params_.p_add + params_.p_duplicate + params_.p_remove &&
             edit.operators.size() > 1) {
    std::size_t at = rng_.uniform_index(edit.operators.size());
    std::string removed = edit.operators[at].name;
    edit.operators.erase(edit.operators.begin() + static_cast<std::ptrdiff_t>(at));
    edit.delta = "remove " + removed + " from position " + std::to_string(at + 1);
  } else {
    std::string prompt_name = "TUNED_PROMPT_" + std::to_string(rng_.uniform_index(1000));
    edit.prompts[prompt_name] = "State the final answer tersely and verify it once.";
    if (!edit.operators.empty()) {
      std::size_t at = rng_.uniform_index(edit.operators.size());
      edit.operators[at].params["instruction"] = "prompt_custom." + prompt_name;
    }
    edit.delta = "rewrite instruction prompt " + prompt_name;
  }

  // drop prompt entries nothing references anymore
  edit.body = synthesize_body(edit.operators);
  auto referenced = referenced_prompts(edit.body);
  for (auto it = edit.prompts.begin(); it != edit.prompts.end();) {
    if (std::find(referenced.begin(), referenced.end(), it->first) == referenced.end()) {
      it = edit.prompts.erase(it);
    } else {
      ++it;
    }
  }
  return edit;
}

EditProposal SimOptimizer::propose_edit(const WorkflowSpec& parent,
                                        std::span<const ExperienceEdgeView> local,
                                        std::span<const GlobalScoreView> global, int next_round) {
  PromptBundle bundle =
      build_optimizer_prompt(parent, local, global, next_round, catalog_);
  ++proposals_;

  std::string response;
  if (params_.fail_every > 0 && proposals_ % params_.fail_every == 0) {
    response = "I would rather not emit sections today.";
  } else {
    response = render_workflow_edit(make_edit(parent));
  }

  EditProposal out;
  out.attempts = 1;
  out.tokens = TokenDelta{approx_tokens(bundle.text), approx_tokens(response)};

  std::string parse_error;
  auto edit = parse_workflow_edit(response, &parse_error);
  if (!edit) {
    out.error = parse_error;
    return out;
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
    return out;
  }
  out.ok = true;
  out.draft = std::move(draft);
  out.delta = edit->delta;
  return out;
}

PredictOutcome SimOptimizer::predict(const WorkflowSpec& w, const PredictContext& ctx) {
  PromptBundle bundle = build_eval_prompt(w, ctx);

  double value = model_.true_mean_score(w, dataset_) + params_.prediction_bias;
  if (params_.prediction_noise > 0.0) {
    value += params_.prediction_noise * (2.0 * rng_.uniform() - 1.0);
  }
  value = std::min(1.0, std::max(0.0, value));
  std::string response = render_prediction(value, "estimated from workflow structure");

  PredictOutcome out;
  out.attempts = 1;
  out.tokens = TokenDelta{approx_tokens(bundle.text), approx_tokens(response)};
  std::string parse_error;
  auto prediction = parse_prediction(response, &parse_error);
  if (!prediction) {
    out.error = parse_error;
    return out;
  }
  out.ok = true;
  out.prediction = std::move(*prediction);
  return out;
}

}  // namespace flowsearch::opt
