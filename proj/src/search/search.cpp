#include "flowsearch/search/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace flowsearch::search {

namespace {

std::string round_id(int round) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "w%03d", round);
  return buf;
}

json per_query_json(const surrogate::PerQueryScores& rows) {
  json arr = json::array();
  for (const auto& [id, score] : rows) arr.push_back(json::array({id, score}));
  return arr;
}

surrogate::PerQueryScores per_query_from_json(const json& arr) {
  surrogate::PerQueryScores rows;
  for (const auto& e : arr) rows.emplace_back(e.at(0).get<std::string>(), e.at(1).get<double>());
  return rows;
}

json ledger_json(const TokenLedger& ledger) {
  json snaps = json::array();
  for (const auto& s : ledger.snapshots()) snaps.push_back(json(s));
  return json{{"optimize", ledger.phase_total(Phase::kOptimize)},
              {"predict", ledger.phase_total(Phase::kPredict)},
              {"execute_full", ledger.phase_total(Phase::kExecuteFull)},
              {"execute_few", ledger.phase_total(Phase::kExecuteFew)},
              {"total", ledger.total()},
              {"snapshots", snaps}};
}

}  // namespace

const WorkflowSpec* SearchState::find_workflow(const std::string& id) const {
  for (const auto& w : workflows) {
    if (w.id == id) return &w;
  }
  return nullptr;
}

std::vector<std::string> SearchState::workflow_ids() const {
  std::vector<std::string> ids;
  ids.reserve(workflows.size());
  for (const auto& w : workflows) ids.push_back(w.id);
  return ids;
}

json state_to_json(const SearchState& state) {
  json effective = json::object();
  for (const auto& [id, record] : state.effective) effective[id] = json(record);

  json local = json::object();
  json global = json::array();
  for (const auto& [id, score] : state.experience.global_entries()) {
    global.push_back(json::array({id, score}));
  }
  for (const auto& w : state.workflows) {
    const auto& edges = state.experience.local(w.id);
    if (edges.empty()) continue;
    json arr = json::array();
    for (const auto& e : edges) {
      arr.push_back(json{{"parent_id", e.parent_id},
                         {"parent_score", e.parent_score},
                         {"delta", e.delta},
                         {"child_id", e.child_id},
                         {"child_score", e.child_score},
                         {"round", e.round}});
    }
    local[w.id] = arr;
  }

  json rows = json::object();
  for (const auto& [id, pq] : state.warmup_rows) rows[id] = per_query_json(pq);

  json j{{"round", state.round},
         {"seed", state.seed},
         {"workflows", state.workflows},
         {"effective", effective},
         {"experience", json{{"global", global}, {"local", local}}},
         {"ledger", ledger_json(state.ledger)},
         {"warmup_rows", rows}};
  j["profile"] = state.profile ? json(*state.profile) : json(nullptr);
  j["fixed_subset"] = state.fixed_subset ? json(*state.fixed_subset) : json(nullptr);
  return j;
}

std::vector<double> selection_probabilities(std::span<const double> scores,
                                            const SelectionConfig& cfg) {
  cfg.validate();
  if (scores.empty()) throw std::invalid_argument("selection over an empty candidate list");
  const double t = static_cast<double>(scores.size());
  double s_max = scores[0];
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("selection score out of [0,1]");
    s_max = std::max(s_max, s);
  }
  double denom = 0.0;
  std::vector<double> expo(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    expo[i] = std::exp(cfg.alpha_sel * (scores[i] - s_max));
    denom += expo[i];
  }
  std::vector<double> p(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p[i] = cfg.lambda / t + (1.0 - cfg.lambda) * (expo[i] / denom);
  }
  return p;
}

std::string select_parent(const std::vector<std::pair<std::string, double>>& scores,
                          const SelectionConfig& cfg, Rng& rng) {
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& [_, v] : scores) values.push_back(v);
  const std::vector<double> p = selection_probabilities(values, cfg);
  return scores[rng.categorical(p)].first;
}

void backpropagate(SearchState& state, const std::string& parent_id,
                   const std::string& child_id, const std::string& delta, double child_score) {
  if (state.find_workflow(parent_id) == nullptr)
    throw std::invalid_argument("backpropagate: unknown parent " + parent_id);
  if (state.find_workflow(child_id) == nullptr)
    throw std::invalid_argument("backpropagate: unknown child " + child_id);
  auto parent_score_it = state.effective.find(parent_id);
  auto child_score_it = state.effective.find(child_id);
  if (parent_score_it == state.effective.end())
    throw std::invalid_argument("backpropagate: parent not scored: " + parent_id);
  if (child_score_it == state.effective.end())
    throw std::invalid_argument("backpropagate: child not scored: " + child_id);

  EditEdge edge;
  edge.parent_id = parent_id;
  edge.parent_score = parent_score_it->second.value;
  edge.delta = delta;
  edge.child_id = child_id;
  edge.child_score = child_score;
  edge.round = child_score_it->second.round;
  state.experience.add_edge(edge);
}

std::vector<TopEntry> top_k(const SearchState& state, int k) {
  std::vector<TopEntry> entries;
  entries.reserve(state.effective.size());
  for (const auto& [id, record] : state.effective) {
    entries.push_back({id, record.round, record.value, to_string(record.kind)});
  }
  std::sort(entries.begin(), entries.end(), [](const TopEntry& a, const TopEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.round != b.round) return a.round < b.round;
    return a.workflow_id < b.workflow_id;
  });
  if (static_cast<int>(entries.size()) > k) entries.resize(static_cast<std::size_t>(k));
  return entries;
}

json report_to_json(const RunReport& report) {
  json top = json::array();
  for (const auto& e : report.top) {
    top.push_back(json{{"workflow_id", e.workflow_id},
                       {"round", e.round},
                       {"score", e.score},
                       {"kind", e.kind}});
  }
  return json{{"top", top},
              {"ledger", report.ledger},
              {"rounds_completed", report.rounds_completed},
              {"workflows_generated", report.workflows_generated},
              {"aborted_rounds", report.aborted_rounds}};
}

SearchRunner::SearchRunner(const RunConfig& cfg, const QuerySet& dataset,
                           const exec::EvaluatorSpec& evaluator, exec::Executor& executor,
                           opt::Optimizer& optimizer, EventWriter* log, EvalMode mode,
                           const OperatorCatalog& catalog)
    : cfg_(cfg), dataset_(dataset), evaluator_(evaluator), executor_(executor),
      optimizer_(optimizer), log_(log), mode_(mode), catalog_(catalog),
      select_rng_(Rng(cfg.seed).derive("select")),
      sampler_rng_(Rng(cfg.seed).derive("sampler")) {
  cfg_.validate();
  dataset_.validate();
  if (dataset_.split != Split::kValidation)
    throw std::invalid_argument("search runs on the validation split");
  state_.seed = cfg_.seed;
}

void SearchRunner::emit(const std::string& type, json payload) {
  if (log_ != nullptr) log_->emit(type, std::move(payload));
}

void SearchRunner::register_workflow(const WorkflowSpec& w) {
  if (state_.find_workflow(w.id) != nullptr)
    throw std::invalid_argument("duplicate workflow id: " + w.id);
  state_.workflows.push_back(w);
  emit("workflow", json{{"round", w.round}, {"workflow", w}});
}

void SearchRunner::record_score(const ScoreRecord& record) {
  record.check();
  if (state_.effective.count(record.workflow_id) != 0)
    throw std::invalid_argument("workflow already scored: " + record.workflow_id);
  state_.effective[record.workflow_id] = record;
  const WorkflowSpec* w = state_.find_workflow(record.workflow_id);
  if (w != nullptr && w->parent_id.empty()) {
    state_.experience.add_global(record.workflow_id, record.value);
  }
}

std::vector<opt::ExperienceEdgeView> SearchRunner::local_views(
    const std::string& parent_id) const {
  std::vector<opt::ExperienceEdgeView> views;
  for (const auto& e : state_.experience.local(parent_id)) {
    views.push_back({e.round, e.parent_score, e.child_score, e.delta});
  }
  return views;
}

std::vector<opt::GlobalScoreView> SearchRunner::global_views() const {
  std::vector<opt::GlobalScoreView> views;
  for (const auto& [id, score] : state_.experience.global_entries()) {
    auto it = state_.effective.find(id);
    views.push_back({id, it == state_.effective.end() ? 0 : it->second.round, score});
  }
  return views;
}

opt::PredictContext SearchRunner::make_predict_context() const {
  opt::PredictContext ctx;
  ctx.dataset_description =
      cfg_.dataset_description.empty()
          ? "Query set '" + dataset_.name + "' (" + std::to_string(dataset_.size()) +
                " items, split " + to_string(dataset_.split) + ")."
          : cfg_.dataset_description;
  std::string shots;
  const int n = std::min<int>(cfg_.prompt_dataset_samples, static_cast<int>(dataset_.size()));
  for (int i = 0; i < n; ++i) {
    shots += json(dataset_.items[static_cast<std::size_t>(i)]).dump() + "\n";
  }
  ctx.dataset_few_shots = shots;
  ctx.operator_description = catalog_.describe();
  ctx.backbone_model = cfg_.backbone_model;
  std::size_t begin = 0;
  if (cfg_.prediction_history_limit > 0 &&
      history_.size() > static_cast<std::size_t>(cfg_.prediction_history_limit)) {
    begin = history_.size() - static_cast<std::size_t>(cfg_.prediction_history_limit);
  }
  ctx.history.assign(history_.begin() + static_cast<std::ptrdiff_t>(begin), history_.end());
  return ctx;
}

ScoreRecord SearchRunner::evaluate_candidate(const WorkflowSpec& w) {
  const bool full_exec = mode_ == EvalMode::kFullExecOnly || w.round <= cfg_.warmup_rounds;
  if (full_exec) {
    exec::EvalOutcome outcome =
        exec::evaluate_full(executor_, w, dataset_, evaluator_, cfg_.parallelism);
    state_.ledger.add(Phase::kExecuteFull, outcome.tokens);
    state_.warmup_rows[w.id] = outcome.per_query;
    emit("exec_full", json{{"round", w.round},
                           {"workflow_id", w.id},
                           {"value", outcome.mean_score},
                           {"n_queries", dataset_.size()},
                           {"tokens", outcome.tokens},
                           {"failures", outcome.failures},
                           {"per_query", per_query_json(outcome.per_query)}});
    return make_score_record(w.id, ScoreKind::kExec, outcome.mean_score,
                             static_cast<int>(dataset_.size()), outcome.tokens, w.round);
  }

  if (!state_.profile.has_value())
    throw std::logic_error("surrogate evaluation before the difficulty profile was frozen");

  const std::vector<std::string>* fixed = nullptr;
  if (!cfg_.sampler.resample_each_round) {
    if (!state_.fixed_subset.has_value()) {
      state_.fixed_subset =
          surrogate::sample_fewshot(*state_.profile, cfg_.sampler, sampler_rng_);
    }
    fixed = &*state_.fixed_subset;
  }

  opt::PredictContext ctx = make_predict_context();
  surrogate::SurrogateResult sr = surrogate::surrogate_evaluate(
      w, *state_.profile, cfg_.sampler, cfg_.calibration, dataset_, evaluator_, executor_,
      optimizer_, ctx, sampler_rng_, cfg_.parallelism, fixed);

  state_.ledger.add(Phase::kPredict, sr.predict_tokens);
  state_.ledger.add(Phase::kExecuteFew, sr.exec_tokens);

  emit("predict", json{{"round", w.round},
                       {"workflow_id", w.id},
                       {"value", sr.outcome.s_pred},
                       {"clamped", sr.prediction.clamped},
                       {"attempts", sr.prediction_attempts},
                       {"fallback", sr.prediction_fallback},
                       {"tokens", sr.predict_tokens}});
  emit("fewshot", json{{"round", w.round},
                       {"workflow_id", w.id},
                       {"subset", sr.subset},
                       {"value", sr.outcome.s_few},
                       {"n_queries", sr.subset.size()},
                       {"failures", sr.exec_failures},
                       {"tokens", sr.exec_tokens}});
  emit("calibrate", json{{"round", w.round},
                         {"workflow_id", w.id},
                         {"s_pred", sr.outcome.s_pred},
                         {"s_few", sr.outcome.s_few},
                         {"epsilon", sr.outcome.epsilon},
                         {"psi", sr.outcome.psi},
                         {"alpha", sr.outcome.alpha},
                         {"s_hat", sr.outcome.s_hat},
                         {"fallback", sr.outcome.fallback}});

  last_prediction_ = sr.outcome.s_pred;
  return make_score_record(w.id, ScoreKind::kCalibrated, sr.outcome.s_hat,
                           static_cast<int>(sr.subset.size()),
                           sr.predict_tokens + sr.exec_tokens, w.round);
}

void SearchRunner::freeze_profile_if_due(int round) {
  if (mode_ == EvalMode::kFullExecOnly) return;
  if (round != cfg_.warmup_rounds || state_.profile.has_value()) return;
  std::vector<surrogate::PerQueryScores> rows;
  for (const auto& w : state_.workflows) {
    if (w.round > cfg_.warmup_rounds) continue;
    auto it = state_.warmup_rows.find(w.id);
    if (it != state_.warmup_rows.end()) rows.push_back(it->second);
  }
  state_.profile = surrogate::build_difficulty_profile(rows, cfg_.sampler.k_bins);
  emit("profile", json{{"round", round}, {"profile", *state_.profile}});
}

bool SearchRunner::do_round(int round) {
  state_.round = round;

  std::vector<std::pair<std::string, double>> scores;
  scores.reserve(state_.workflows.size());
  for (const auto& w : state_.workflows) scores.emplace_back(w.id, state_.effective.at(w.id).value);

  const std::string parent_id = select_parent(scores, cfg_.selection, select_rng_);
  emit("select", json{{"round", round}, {"t", scores.size()}, {"parent_id", parent_id}});

  const WorkflowSpec& parent = *state_.find_workflow(parent_id);
  auto local = local_views(parent_id);
  auto global = global_views();
  opt::EditProposal proposal = optimizer_.propose_edit(parent, local, global, round);
  state_.ledger.add(Phase::kOptimize, proposal.tokens);

  if (!proposal.ok) {
    ++aborted_rounds_;
    emit("round_aborted", json{{"round", round},
                               {"parent_id", parent_id},
                               {"error", proposal.error},
                               {"attempts", proposal.attempts},
                               {"tokens", proposal.tokens}});
    return false;
  }

  WorkflowSpec child = proposal.draft;
  child.id = round_id(round);
  child.round = round;
  child.parent_id = parent_id;
  const auto known = state_.workflow_ids();
  ValidationReport report = validate_workflow(child, catalog_, &known);
  if (!report.ok()) {
    ++aborted_rounds_;
    emit("round_aborted", json{{"round", round},
                               {"parent_id", parent_id},
                               {"error", "invalid workflow: " + report.summary()},
                               {"attempts", proposal.attempts},
                               {"tokens", proposal.tokens}});
    return false;
  }

  register_workflow(child);
  emit("expand", json{{"round", round},
                      {"parent_id", parent_id},
                      {"child_id", child.id},
                      {"delta", proposal.delta},
                      {"delta_defaulted", proposal.delta_defaulted},
                      {"attempts", proposal.attempts},
                      {"tokens", proposal.tokens}});

  ScoreRecord record = evaluate_candidate(child);
  record_score(record);
  emit("score", json{{"round", round},
                     {"workflow_id", child.id},
                     {"kind", to_string(record.kind)},
                     {"value", record.value},
                     {"n_queries", record.n_queries},
                     {"tokens", record.tokens},
                     {"eval_tokens", record.tokens.total()}});

  backpropagate(state_, parent_id, child.id, proposal.delta, record.value);
  emit("backprop", json{{"round", round},
                        {"parent_id", parent_id},
                        {"parent_score", state_.effective.at(parent_id).value},
                        {"child_id", child.id},
                        {"child_score", record.value},
                        {"delta", proposal.delta}});

  const double prediction = record.kind == ScoreKind::kCalibrated ? last_prediction_ : -1.0;
  history_.push_back({round, record.value, prediction,
                      opt::workflow_code_block(child) + opt::prompts_code_block(child.prompts)});
  return true;
}

RunReport SearchRunner::run() {
  emit("run_start", json{{"config", cfg_},
                         {"dataset_name", dataset_.name},
                         {"dataset_size", dataset_.size()},
                         {"backend", executor_.backend_name()},
                         {"optimizer", optimizer_.name()},
                         {"mode", mode_ == EvalMode::kTwoStage ? "two_stage" : "full_exec"}});

  // round 1: the initial workflow
  state_.round = 1;
  WorkflowSpec root = cfg_.initial_workflow ? *cfg_.initial_workflow
                                            : make_initial_workflow(round_id(1));
  root.round = 1;
  root.parent_id.clear();
  if (root.id.empty()) root.id = round_id(1);
  ValidationReport root_report = validate_workflow(root, catalog_);
  if (!root_report.ok())
    throw std::invalid_argument("initial workflow invalid: " + root_report.summary());

  register_workflow(root);
  ScoreRecord root_record = evaluate_candidate(root);
  record_score(root_record);
  emit("score", json{{"round", 1},
                     {"workflow_id", root.id},
                     {"kind", to_string(root_record.kind)},
                     {"value", root_record.value},
                     {"n_queries", root_record.n_queries},
                     {"tokens", root_record.tokens},
                     {"eval_tokens", root_record.tokens.total()}});
  history_.push_back({1, root_record.value, -1.0,
                      opt::workflow_code_block(root) + opt::prompts_code_block(root.prompts)});
  freeze_profile_if_due(1);
  state_.ledger.take_snapshot(1);
  emit("round_end", json{{"round", 1}, {"ledger", state_.ledger.current(1)}});

  for (int round = 2; round <= cfg_.total_rounds; ++round) {
    try {
      do_round(round);
    } catch (const std::exception& e) {
      throw std::runtime_error("round " + std::to_string(round) + ": " + e.what());
    }
    freeze_profile_if_due(round);
    state_.ledger.take_snapshot(round);
    emit("round_end", json{{"round", round}, {"ledger", state_.ledger.current(round)}});
  }

  RunReport report;
  report.top = top_k(state_, cfg_.top_k);
  report.ledger = state_.ledger.current(cfg_.total_rounds);
  report.rounds_completed = cfg_.total_rounds;
  report.workflows_generated = static_cast<int>(state_.workflows.size());
  report.aborted_rounds = aborted_rounds_;
  emit("run_end", json{{"report", report_to_json(report)}});
  return report;
}

RunResult run_search(const RunConfig& cfg, const QuerySet& dataset,
                     const exec::EvaluatorSpec& evaluator, exec::Executor& executor,
                     opt::Optimizer& optimizer, EventWriter* log, EvalMode mode) {
  SearchRunner runner(cfg, dataset, evaluator, executor, optimizer, log, mode);
  RunResult result;
  result.report = runner.run();
  result.state = runner.state();
  return result;
}

SearchState replay_state(const std::vector<json>& events) {
  SearchState state;
  bool resample_each_round = true;
  for (const auto& e : events) {
    const std::string type = e.at("type").get<std::string>();
    if (type == "run_start") {
      RunConfig cfg;
      e.at("config").get_to(cfg);
      state.seed = cfg.seed;
      resample_each_round = cfg.sampler.resample_each_round;
    } else if (type == "workflow") {
      state.workflows.push_back(e.at("workflow").get<WorkflowSpec>());
    } else if (type == "exec_full") {
      state.warmup_rows[e.at("workflow_id").get<std::string>()] =
          per_query_from_json(e.at("per_query"));
      state.ledger.add(Phase::kExecuteFull, e.at("tokens").get<TokenDelta>());
    } else if (type == "predict") {
      state.ledger.add(Phase::kPredict, e.at("tokens").get<TokenDelta>());
    } else if (type == "fewshot") {
      state.ledger.add(Phase::kExecuteFew, e.at("tokens").get<TokenDelta>());
      if (!resample_each_round && !state.fixed_subset.has_value()) {
        state.fixed_subset = e.at("subset").get<std::vector<std::string>>();
      }
    } else if (type == "expand" || type == "round_aborted") {
      state.ledger.add(Phase::kOptimize, e.at("tokens").get<TokenDelta>());
    } else if (type == "score") {
      ScoreRecord record;
      record.workflow_id = e.at("workflow_id").get<std::string>();
      record.kind = score_kind_from_string(e.at("kind").get<std::string>());
      record.value = e.at("value").get<double>();
      record.n_queries = e.at("n_queries").get<int>();
      record.tokens = e.at("tokens").get<TokenDelta>();
      record.round = e.at("round").get<int>();
      record.check();
      state.effective[record.workflow_id] = record;
      const WorkflowSpec* w = state.find_workflow(record.workflow_id);
      if (w != nullptr && w->parent_id.empty()) {
        state.experience.add_global(record.workflow_id, record.value);
      }
    } else if (type == "backprop") {
      EditEdge edge;
      edge.parent_id = e.at("parent_id").get<std::string>();
      edge.parent_score = e.at("parent_score").get<double>();
      edge.delta = e.at("delta").get<std::string>();
      edge.child_id = e.at("child_id").get<std::string>();
      edge.child_score = e.at("child_score").get<double>();
      edge.round = e.at("round").get<int>();
      state.experience.add_edge(edge);
    } else if (type == "profile") {
      state.profile = e.at("profile").get<surrogate::DifficultyProfile>();
    } else if (type == "round_end") {
      state.round = e.at("round").get<int>();
      state.ledger.take_snapshot(state.round);
    }
  }
  return state;
}

}  // namespace flowsearch::search
