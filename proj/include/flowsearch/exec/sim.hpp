#pragma once

#include <cstdint>

#include "flowsearch/exec/executor.hpp"

namespace flowsearch::exec {

/// Parameters of the simulated execution backend. Every outcome is a pure
/// function of (seed, salt, workflow id, query id); `salt` distinguishes
/// repeated runs of the same workflow.
struct SimParams {
  std::uint64_t seed = 1;
  std::uint64_t salt = 0;

  // landscape shape
  double base_quality = 0.55;  // quality of a workflow with no operators
  double hardness = 0.3;       // how strongly query difficulty depresses success
  double length_penalty = 0.03;  // per operator beyond length_cap
  int length_cap = 7;

  // token model: per-query cost grows with workflow size, with bounded jitter
  std::int64_t prompt_tokens_base = 60;
  std::int64_t prompt_tokens_per_op = 40;
  std::int64_t prompt_tokens_jitter = 32;  // uniform in [0, jitter)
  std::int64_t completion_tokens_base = 24;
  std::int64_t completion_tokens_jitter = 16;

  // test hook: force theta_w(q) to a constant success probability
  double fixed_theta = -1.0;  // < 0 disables
};

/// Ground-truth landscape tying per-query success probability to workflow
/// features, so that optimizer edits change quality in a known way.
///
/// quality(w) = clamp(base + sum_op gain(op) * (1 - 0.5^count(op))
///                    - length_penalty * max(0, n_ops - length_cap), 0.05, 1.2)
/// theta_w(q) = clamp01(quality(w) - hardness * d(q))
///
/// with d(q) in [0,1] a per-query difficulty hashed from (seed, query id).
class SimWorkflowModel {
 public:
  explicit SimWorkflowModel(SimParams params) : params_(params) {}

  const SimParams& params() const { return params_; }

  double query_difficulty(const std::string& query_id) const;
  double quality(const WorkflowSpec& w) const;
  double success_prob(const WorkflowSpec& w, const QueryItem& q) const;

  /// Exact expected execution score: mean_q theta_w(q). This is the TRUE
  /// score the synthetic studies compare against.
  double true_mean_score(const WorkflowSpec& w, const QuerySet& queries) const;

  /// Per-operator quality gain; 0 for operators outside the table.
  static double operator_gain(const std::string& name);

 private:
  SimParams params_;
};

/// Deterministic simulated executor. A query is answered with the reference
/// text with probability theta_w(q), decided by hashing (seed, salt,
/// workflow id, query id); otherwise a canonical wrong answer is produced.
class SimExecutor : public Executor {
 public:
  explicit SimExecutor(SimParams params) : model_(params) {}

  ExecutionResult execute(const WorkflowSpec& w, const QueryItem& q) override;
  std::string backend_name() const override { return "sim"; }

  const SimWorkflowModel& model() const { return model_; }

 private:
  SimWorkflowModel model_;
};

/// Synthetic validation set: n queries with hashed difficulties and
/// references the simulated executor can reproduce.
QuerySet make_synthetic_queryset(std::size_t n, std::uint64_t seed,
                                 Split split = Split::kValidation);

}  // namespace flowsearch::exec
