#pragma once

#include <memory>
#include <span>
#include <string>

#include "flowsearch/core/score.hpp"
#include "flowsearch/core/types.hpp"
#include "flowsearch/exec/wire.hpp"
#include "flowsearch/optimizer/parse.hpp"
#include "flowsearch/optimizer/prompt.hpp"

namespace flowsearch::opt {

/// Result of an expansion attempt. Failed proposals still report the tokens
/// the attempts consumed.
struct EditProposal {
  bool ok = false;
  WorkflowSpec draft;  // round/parent_id set; id left for the caller to assign
  std::string delta;
  TokenDelta tokens;
  int attempts = 0;
  bool delta_defaulted = false;
  std::string error;
};

struct PredictOutcome {
  bool ok = false;
  Prediction prediction;
  TokenDelta tokens;
  int attempts = 0;
  std::string error;
};

/// The LLM-facing optimizer: proposes workflow edits and predicts workflow
/// scores. Implementations retry internally up to their configured budgets.
class Optimizer {
 public:
  virtual ~Optimizer() = default;

  virtual EditProposal propose_edit(const WorkflowSpec& parent,
                                    std::span<const ExperienceEdgeView> local,
                                    std::span<const GlobalScoreView> global, int next_round) = 0;

  virtual PredictOutcome predict(const WorkflowSpec& w, const PredictContext& ctx) = 0;

  virtual std::string name() const = 0;
};

/// One text completion against an LLM backend.
struct LlmResponse {
  bool ok = false;
  std::string text;
  TokenDelta tokens;
  std::string error;
};

class LlmCaller {
 public:
  virtual ~LlmCaller() = default;
  virtual LlmResponse complete(const std::string& prompt) = 0;
};

/// LlmCaller over the chat-completion wire client.
class ChatLlmCaller : public LlmCaller {
 public:
  explicit ChatLlmCaller(exec::WireConfig config) : client_(std::move(config)) {}
  LlmResponse complete(const std::string& prompt) override;
  exec::ChatClient& client() { return client_; }

 private:
  exec::ChatClient client_;
};

/// One self-prediction: renders the evaluation bundle, queries the caller,
/// parses the <box> value. Retries with fresh sampling up to `retries`
/// attempts; tokens of every attempt are reported. Failure after retries
/// surfaces to the surrogate fallback.
PredictOutcome self_predict(const WorkflowSpec& w, const PredictContext& ctx, LlmCaller& caller,
                            const Template& tmpl = TemplateRepo::default_eval(), int retries = 3);

struct LlmOptimizerOptions {
  int expansion_retries = 3;
  int prediction_retries = 3;
  int experience_limit = 0;  // 0 = all
  Template optimize_template = TemplateRepo::default_optimize();
  Template eval_template = TemplateRepo::default_eval();
};

/// Production optimizer: prompts an LLM for edits and predictions, parses and
/// validates the responses.
class LlmOptimizer : public Optimizer {
 public:
  LlmOptimizer(LlmCaller& caller, const OperatorCatalog& catalog, LlmOptimizerOptions options = {});

  EditProposal propose_edit(const WorkflowSpec& parent, std::span<const ExperienceEdgeView> local,
                            std::span<const GlobalScoreView> global, int next_round) override;
  PredictOutcome predict(const WorkflowSpec& w, const PredictContext& ctx) override;
  std::string name() const override { return "llm"; }

 private:
  LlmCaller& caller_;
  const OperatorCatalog& catalog_;
  LlmOptimizerOptions options_;
};

}  // namespace flowsearch::opt
