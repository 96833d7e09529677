#include "flowsearch/exec/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "flowsearch/core/rng.hpp"

namespace flowsearch::exec {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

std::uint64_t triple_hash(std::uint64_t seed, std::uint64_t salt, const std::string& a,
                          const std::string& b, std::string_view tag) {
  std::uint64_t h = hash_combine(seed, salt);
  h = hash_combine(h, fnv1a64(a));
  h = hash_combine(h, fnv1a64(b));
  return hash_combine(h, fnv1a64(tag));
}

}  // namespace

double SimWorkflowModel::operator_gain(const std::string& name) {
  static const std::map<std::string, double> gains = {
      {"Custom", 0.10},   {"AnswerGenerate", 0.14},     {"ScEnsemble", 0.16},
      {"Programmer", 0.14}, {"Test", 0.12},             {"CustomCodeGenerate", 0.10},
      {"Review", 0.10},   {"Revise", 0.08},
  };
  auto it = gains.find(name);
  return it == gains.end() ? 0.0 : it->second;
}

double SimWorkflowModel::query_difficulty(const std::string& query_id) const {
  return hash_unit(hash_combine(hash_combine(params_.seed, fnv1a64("difficulty")),
                                fnv1a64(query_id)));
}

double SimWorkflowModel::quality(const WorkflowSpec& w) const {
  std::map<std::string, int> counts;
  for (const auto& call : w.operators) counts[call.name] += 1;
  double q = params_.base_quality;
  for (const auto& [name, count] : counts) {
    q += operator_gain(name) * (1.0 - std::pow(0.5, count));
  }
  const int n_ops = static_cast<int>(w.operators.size());
  if (n_ops > params_.length_cap) {
    q -= params_.length_penalty * static_cast<double>(n_ops - params_.length_cap);
  }
  return std::min(1.2, std::max(0.05, q));
}

double SimWorkflowModel::success_prob(const WorkflowSpec& w, const QueryItem& q) const {
  if (params_.fixed_theta >= 0.0) return clamp01(params_.fixed_theta);
  return clamp01(quality(w) - params_.hardness * query_difficulty(q.id));
}

double SimWorkflowModel::true_mean_score(const WorkflowSpec& w, const QuerySet& queries) const {
  double sum = 0.0;
  for (const auto& q : queries.items) sum += success_prob(w, q);
  return sum / static_cast<double>(queries.items.size());
}

ExecutionResult SimExecutor::execute(const WorkflowSpec& w, const QueryItem& q) {
  const SimParams& p = model_.params();
  const double theta = model_.success_prob(w, q);
  const double draw = hash_unit(triple_hash(p.seed, p.salt, w.id, q.id, "outcome"));

  ExecutionResult r;
  r.query_id = q.id;
  r.answer = draw < theta ? q.reference : "unanswered(" + q.id + ")";

  const std::int64_t n_ops = static_cast<std::int64_t>(w.operators.size());
  const std::uint64_t th = triple_hash(p.seed, p.salt, w.id, q.id, "tokens");
  r.prompt_tokens = p.prompt_tokens_base + p.prompt_tokens_per_op * n_ops;
  if (p.prompt_tokens_jitter > 0)
    r.prompt_tokens += static_cast<std::int64_t>(th % static_cast<std::uint64_t>(p.prompt_tokens_jitter));
  r.completion_tokens = p.completion_tokens_base;
  if (p.completion_tokens_jitter > 0)
    r.completion_tokens += static_cast<std::int64_t>(
        mix64(th) % static_cast<std::uint64_t>(p.completion_tokens_jitter));
  r.latency_ms = 1 + static_cast<std::int64_t>(mix64(th + 1) % 5);
  return r;
}

QuerySet make_synthetic_queryset(std::size_t n, std::uint64_t seed, Split split) {
  QuerySet qs;
  qs.name = "synthetic-" + std::to_string(n) + "-" + std::to_string(seed);
  qs.split = split;
  qs.items.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    QueryItem q;
    q.id = "q" + std::to_string(i);
    q.input = "synthetic task " + std::to_string(i);
    q.reference = "ans-" + std::to_string(i);
    qs.items.push_back(std::move(q));
  }
  return qs;
}

}  // namespace flowsearch::exec
