#pragma once

#include <optional>

#include "flowsearch/core/config.hpp"
#include "flowsearch/core/event_log.hpp"
#include "flowsearch/core/ledger.hpp"
#include "flowsearch/core/rng.hpp"
#include "flowsearch/exec/executor.hpp"
#include "flowsearch/optimizer/optimizer.hpp"
#include "flowsearch/search/experience.hpp"
#include "flowsearch/surrogate/surrogate.hpp"

namespace flowsearch::search {

/// Live state of one search run. One effective score per registered workflow:
/// full-execution scores through the warm-up rounds, calibrated surrogate
/// scores afterwards, on the same [0,1] scale.
struct SearchState {
  int round = 0;
  std::uint64_t seed = 0;
  std::vector<WorkflowSpec> workflows;  // creation order
  std::map<std::string, ScoreRecord> effective;
  ExperienceStore experience;
  TokenLedger ledger;

  // per-query rows of warm-up full executions, keyed by workflow id
  std::map<std::string, surrogate::PerQueryScores> warmup_rows;
  std::optional<surrogate::DifficultyProfile> profile;  // frozen at round M
  std::optional<std::vector<std::string>> fixed_subset;

  const WorkflowSpec* find_workflow(const std::string& id) const;
  std::vector<std::string> workflow_ids() const;
};

json state_to_json(const SearchState& state);

/// Eq.-style soft mixed selection probabilities over the current candidates:
/// p_i = lambda / t + (1 - lambda) * softmax(alpha_sel * (s_i - s_max))_i.
std::vector<double> selection_probabilities(std::span<const double> scores,
                                            const SelectionConfig& cfg);

/// Samples one parent id from the soft mixed policy. Throws on an empty list,
/// scores outside [0,1], or invalid config.
std::string select_parent(const std::vector<std::pair<std::string, double>>& scores,
                          const SelectionConfig& cfg, Rng& rng);

/// Records an edit in local and global experience. Requires both ids
/// registered and scored; idempotent per (parent, child) pair.
void backpropagate(SearchState& state, const std::string& parent_id,
                   const std::string& child_id, const std::string& delta, double child_score);

struct TopEntry {
  std::string workflow_id;
  int round = 0;
  double score = 0.0;
  std::string kind;
};

/// Top k by effective score; ties break toward the earlier round, then the
/// lexicographically smaller id.
std::vector<TopEntry> top_k(const SearchState& state, int k);

struct RunReport {
  std::vector<TopEntry> top;
  LedgerSnapshot ledger;
  int rounds_completed = 0;
  int workflows_generated = 0;
  int aborted_rounds = 0;
};

json report_to_json(const RunReport& report);

/// Evaluation regime: the two-stage loop, or full execution in every round
/// (the cost baseline the synthetic studies compare against).
enum class EvalMode { kTwoStage, kFullExecOnly };

/// Drives rounds 1..T: round 1 evaluates the initial workflow, every later
/// round selects a parent, expands it through the optimizer, evaluates by
/// stage (full execution through round M, calibrated surrogate after), and
/// backpropagates experience. All events stream to `log` when given.
class SearchRunner {
 public:
  SearchRunner(const RunConfig& cfg, const QuerySet& dataset,
               const exec::EvaluatorSpec& evaluator, exec::Executor& executor,
               opt::Optimizer& optimizer, EventWriter* log = nullptr,
               EvalMode mode = EvalMode::kTwoStage,
               const OperatorCatalog& catalog = OperatorCatalog::standard());

  RunReport run();

  /// Stage-dependent evaluation of a registered candidate; exposed for tests.
  ScoreRecord evaluate_candidate(const WorkflowSpec& w);

  const SearchState& state() const { return state_; }
  SearchState& mutable_state() { return state_; }

 private:
  friend struct RunnerTestAccess;

  void register_workflow(const WorkflowSpec& w);
  void record_score(const ScoreRecord& record);
  bool do_round(int round);  // false if the round was aborted
  void freeze_profile_if_due(int round);
  opt::PredictContext make_predict_context() const;
  std::vector<opt::ExperienceEdgeView> local_views(const std::string& parent_id) const;
  std::vector<opt::GlobalScoreView> global_views() const;
  void emit(const std::string& type, json payload);

  const RunConfig& cfg_;
  const QuerySet& dataset_;
  const exec::EvaluatorSpec& evaluator_;
  exec::Executor& executor_;
  opt::Optimizer& optimizer_;
  EventWriter* log_;
  EvalMode mode_;
  const OperatorCatalog& catalog_;

  SearchState state_;
  Rng select_rng_;
  Rng sampler_rng_;
  std::vector<opt::PredictionHistoryEntry> history_;
  double last_prediction_ = -1.0;
  int aborted_rounds_ = 0;
};

struct RunResult {
  RunReport report;
  SearchState state;
};

RunResult run_search(const RunConfig& cfg, const QuerySet& dataset,
                     const exec::EvaluatorSpec& evaluator, exec::Executor& executor,
                     opt::Optimizer& optimizer, EventWriter* log = nullptr,
                     EvalMode mode = EvalMode::kTwoStage);

/// Folds a run log back into a SearchState; the result of a completed run
/// equals the live final state.
SearchState replay_state(const std::vector<json>& events);

}  // namespace flowsearch::search
