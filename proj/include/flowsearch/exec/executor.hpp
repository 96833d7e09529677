#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowsearch/core/score.hpp"
#include "flowsearch/core/types.hpp"
#include "flowsearch/exec/evaluator.hpp"

namespace flowsearch::exec {

/// Outcome of running one workflow on one query.
struct ExecutionResult {
  std::string query_id;
  std::string answer;
  double correct_score = 0.0;  // assigned by the evaluator, not by execute()
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t latency_ms = 0;
  bool failed = false;  // transport/timeout failure; scores 0 and is flagged

  TokenDelta tokens() const { return {prompt_tokens, completion_tokens}; }
};

/// A workflow execution backend. execute() must be safe for concurrent
/// invocation across queries.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual ExecutionResult execute(const WorkflowSpec& w, const QueryItem& q) = 0;
  virtual std::string backend_name() const = 0;
};

struct EvalOutcome {
  double mean_score = 0.0;
  std::vector<std::pair<std::string, double>> per_query;  // (query id, score), input order
  TokenDelta tokens;
  int failures = 0;
};

/// Mean score of a workflow over every query of the set; per-query scores are
/// retained for difficulty profiling and coverage analysis. Executions fan out
/// over `parallelism` threads; aggregation is keyed by query id so the result
/// is order-independent.
EvalOutcome evaluate_full(Executor& executor, const WorkflowSpec& w, const QuerySet& queries,
                          const EvaluatorSpec& evaluator, int parallelism = 1);

/// Same, restricted to the given query ids (each must exist in the set).
EvalOutcome evaluate_subset(Executor& executor, const WorkflowSpec& w, const QuerySet& queries,
                            std::span<const std::string> subset_ids,
                            const EvaluatorSpec& evaluator, int parallelism = 1);

}  // namespace flowsearch::exec
