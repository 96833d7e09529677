#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "flowsearch/core/types.hpp"
#include "flowsearch/optimizer/templates.hpp"

namespace flowsearch::opt {

enum class PromptKind { kOptimize, kEvaluate };

/// A fully rendered prompt plus the identity of what went into it.
struct PromptBundle {
  PromptKind kind = PromptKind::kOptimize;
  std::string template_id;
  std::string text;
  std::string inputs_digest;  // hex hash of the rendered inputs
};

/// One prior edit of a workflow, as shown to the optimizer.
struct ExperienceEdgeView {
  int round = 0;  // round of the child
  double parent_score = 0.0;
  double child_score = 0.0;
  std::string delta;
};

/// One globally evaluated workflow, as shown to the optimizer.
struct GlobalScoreView {
  std::string workflow_id;
  int round = 0;
  double score = 0.0;
};

/// One past (round, actual score, predicted score, code) record shown in the
/// evaluation prompt's experience slot. prediction < 0 renders as "n/a"
/// (warm-up rounds have no prediction).
struct PredictionHistoryEntry {
  int round = 0;
  double score = 0.0;
  double prediction = -1.0;
  std::string code;
};

/// Inputs of the evaluation prompt other than the workflow itself.
struct PredictContext {
  std::string dataset_description;
  std::string dataset_few_shots;  // JSONL rows quoted in the prompt
  std::string operator_description;
  std::string backbone_model;
  std::vector<PredictionHistoryEntry> history;
};

/// Replaces each `{name}` from `values` in the template text. Placeholders
/// without a value are left untouched (callers pass every known name, possibly
/// empty). Substitution is literal, single pass.
std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& values);

/// Names from `names` that still appear as `{name}` in the rendered text.
std::vector<std::string> unfilled_placeholders(const std::string& rendered,
                                               std::span<const std::string> names);

/// Workflow and prompts rendered as the python-style code blocks the
/// templates embed.
std::string workflow_code_block(const WorkflowSpec& w);
std::string prompts_code_block(const std::map<std::string, std::string>& prompts);

/// Expansion prompt from parent workflow and experience (deterministic in its
/// inputs). `experience_limit` > 0 keeps only the most recent entries.
PromptBundle build_optimizer_prompt(const WorkflowSpec& parent,
                                    std::span<const ExperienceEdgeView> local,
                                    std::span<const GlobalScoreView> global, int round,
                                    const OperatorCatalog& catalog,
                                    const Template& tmpl = TemplateRepo::default_optimize(),
                                    int experience_limit = 0);

/// Evaluation prompt for self-prediction; all placeholders filled, empty
/// inputs render as empty sections.
PromptBundle build_eval_prompt(const WorkflowSpec& w, const PredictContext& ctx,
                               const Template& tmpl = TemplateRepo::default_eval());

}  // namespace flowsearch::opt
