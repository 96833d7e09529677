#include "flowsearch/exec/executor.hpp"

#include <stdexcept>
#include <thread>

namespace flowsearch::exec {

namespace {

EvalOutcome run_over(Executor& executor, const WorkflowSpec& w,
                     const std::vector<const QueryItem*>& queries,
                     const EvaluatorSpec& evaluator, int parallelism) {
  if (queries.empty()) throw std::invalid_argument("evaluation over an empty query set");
  evaluator.validate();

  std::vector<ExecutionResult> results(queries.size());
  auto worker = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < queries.size(); i += step) {
      ExecutionResult r = executor.execute(w, *queries[i]);
      r.correct_score = r.failed ? 0.0 : evaluate_answer(r.answer, queries[i]->reference, evaluator);
      results[i] = std::move(r);
    }
  };

  const int n_threads = std::min<int>(parallelism, static_cast<int>(queries.size()));
  if (n_threads <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      threads.emplace_back(worker, static_cast<std::size_t>(t),
                           static_cast<std::size_t>(n_threads));
    }
    for (auto& t : threads) t.join();
  }

  EvalOutcome outcome;
  outcome.per_query.reserve(results.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    sum += r.correct_score;
    outcome.per_query.emplace_back(queries[i]->id, r.correct_score);
    outcome.tokens += r.tokens();
    if (r.failed) ++outcome.failures;
  }
  outcome.mean_score = sum / static_cast<double>(results.size());
  return outcome;
}

}  // namespace

EvalOutcome evaluate_full(Executor& executor, const WorkflowSpec& w, const QuerySet& queries,
                          const EvaluatorSpec& evaluator, int parallelism) {
  std::vector<const QueryItem*> ptrs;
  ptrs.reserve(queries.items.size());
  for (const auto& q : queries.items) ptrs.push_back(&q);
  return run_over(executor, w, ptrs, evaluator, parallelism);
}

EvalOutcome evaluate_subset(Executor& executor, const WorkflowSpec& w, const QuerySet& queries,
                            std::span<const std::string> subset_ids,
                            const EvaluatorSpec& evaluator, int parallelism) {
  if (subset_ids.empty()) throw std::invalid_argument("evaluation subset is empty");
  std::vector<const QueryItem*> ptrs;
  ptrs.reserve(subset_ids.size());
  for (const auto& id : subset_ids) {
    const QueryItem* q = queries.find(id);
    if (q == nullptr) throw std::invalid_argument("subset id not in query set: " + id);
    ptrs.push_back(q);
  }
  return run_over(executor, w, ptrs, evaluator, parallelism);
}

}  // namespace flowsearch::exec
