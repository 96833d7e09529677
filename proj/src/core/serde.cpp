#include "flowsearch/core/serde.hpp"

namespace flowsearch {

void to_json(json& j, const QueryItem& q) {
  j = json{{"id", q.id}, {"input", q.input}, {"reference", q.reference}, {"metadata", q.metadata}};
}

void from_json(const json& j, QueryItem& q) {
  j.at("id").get_to(q.id);
  j.at("input").get_to(q.input);
  q.reference = j.value("reference", std::string{});
  q.metadata = j.value("metadata", std::map<std::string, std::string>{});
}

void to_json(json& j, const QuerySet& qs) {
  j = json{{"name", qs.name}, {"split", to_string(qs.split)}, {"items", qs.items}};
}

void from_json(const json& j, QuerySet& qs) {
  j.at("name").get_to(qs.name);
  qs.split = split_from_string(j.at("split").get<std::string>());
  j.at("items").get_to(qs.items);
}

void to_json(json& j, const OperatorCall& c) {
  j = json{{"name", c.name}, {"params", c.params}};
}

void from_json(const json& j, OperatorCall& c) {
  j.at("name").get_to(c.name);
  c.params = j.value("params", std::map<std::string, std::string>{});
}

void to_json(json& j, const WorkflowSpec& w) {
  j = json{{"id", w.id},           {"round", w.round},   {"parent_id", w.parent_id},
           {"operators", w.operators}, {"prompts", w.prompts}, {"body", w.body},
           {"notes", w.notes}};
}

void from_json(const json& j, WorkflowSpec& w) {
  j.at("id").get_to(w.id);
  j.at("round").get_to(w.round);
  w.parent_id = j.value("parent_id", std::string{});
  w.operators = j.value("operators", std::vector<OperatorCall>{});
  w.prompts = j.value("prompts", std::map<std::string, std::string>{});
  w.body = j.value("body", std::string{});
  w.notes = j.value("notes", std::string{});
}

void to_json(json& j, const TokenDelta& d) {
  j = json{{"prompt", d.prompt}, {"completion", d.completion}};
}

void from_json(const json& j, TokenDelta& d) {
  j.at("prompt").get_to(d.prompt);
  j.at("completion").get_to(d.completion);
}

void to_json(json& j, const ScoreRecord& r) {
  j = json{{"workflow_id", r.workflow_id},
           {"kind", to_string(r.kind)},
           {"value", r.value},
           {"n_queries", r.n_queries},
           {"tokens", r.tokens},
           {"round", r.round}};
}

void from_json(const json& j, ScoreRecord& r) {
  j.at("workflow_id").get_to(r.workflow_id);
  r.kind = score_kind_from_string(j.at("kind").get<std::string>());
  j.at("value").get_to(r.value);
  j.at("n_queries").get_to(r.n_queries);
  j.at("tokens").get_to(r.tokens);
  j.at("round").get_to(r.round);
  r.check();
}

void to_json(json& j, const LedgerSnapshot& s) {
  j = json{{"round", s.round},
           {"optimize", s.optimize},
           {"predict", s.predict},
           {"execute_full", s.execute_full},
           {"execute_few", s.execute_few},
           {"total", s.total}};
}

void from_json(const json& j, LedgerSnapshot& s) {
  j.at("round").get_to(s.round);
  j.at("optimize").get_to(s.optimize);
  j.at("predict").get_to(s.predict);
  j.at("execute_full").get_to(s.execute_full);
  j.at("execute_few").get_to(s.execute_few);
  j.at("total").get_to(s.total);
}

void to_json(json& j, const SelectionConfig& c) {
  j = json{{"lambda", c.lambda}, {"alpha_sel", c.alpha_sel}};
}

void from_json(const json& j, SelectionConfig& c) {
  c.lambda = j.value("lambda", c.lambda);
  c.alpha_sel = j.value("alpha_sel", c.alpha_sel);
}

void to_json(json& j, const SamplerConfig& c) {
  j = json{{"k_bins", c.k_bins},
           {"gamma", c.gamma},
           {"rho", c.rho},
           {"resample_each_round", c.resample_each_round}};
}

void from_json(const json& j, SamplerConfig& c) {
  c.k_bins = j.value("k_bins", c.k_bins);
  c.gamma = j.value("gamma", c.gamma);
  c.rho = j.value("rho", c.rho);
  c.resample_each_round = j.value("resample_each_round", c.resample_each_round);
}

void to_json(json& j, const CalibrationConfig& c) {
  j = json{{"tau", c.tau}, {"alpha_max", c.alpha_max}};
}

void from_json(const json& j, CalibrationConfig& c) {
  c.tau = j.value("tau", c.tau);
  c.alpha_max = j.value("alpha_max", c.alpha_max);
}

void to_json(json& j, const RunConfig& c) {
  j = json{{"warmup_rounds", c.warmup_rounds},
           {"total_rounds", c.total_rounds},
           {"selection", c.selection},
           {"sampler", c.sampler},
           {"calibration", c.calibration},
           {"seed", c.seed},
           {"parallelism", c.parallelism},
           {"top_k", c.top_k},
           {"expansion_retries", c.expansion_retries},
           {"prediction_retries", c.prediction_retries},
           {"experience_limit", c.experience_limit},
           {"prediction_history_limit", c.prediction_history_limit},
           {"prompt_dataset_samples", c.prompt_dataset_samples},
           {"backbone_model", c.backbone_model},
           {"dataset_description", c.dataset_description}};
  if (c.initial_workflow) j["initial_workflow"] = *c.initial_workflow;
}

void from_json(const json& j, RunConfig& c) {
  c.warmup_rounds = j.value("warmup_rounds", c.warmup_rounds);
  c.total_rounds = j.value("total_rounds", c.total_rounds);
  if (j.contains("selection")) j.at("selection").get_to(c.selection);
  if (j.contains("sampler")) j.at("sampler").get_to(c.sampler);
  if (j.contains("calibration")) j.at("calibration").get_to(c.calibration);
  c.seed = j.value("seed", c.seed);
  c.parallelism = j.value("parallelism", c.parallelism);
  c.top_k = j.value("top_k", c.top_k);
  c.expansion_retries = j.value("expansion_retries", c.expansion_retries);
  c.prediction_retries = j.value("prediction_retries", c.prediction_retries);
  c.experience_limit = j.value("experience_limit", c.experience_limit);
  c.prediction_history_limit = j.value("prediction_history_limit", c.prediction_history_limit);
  c.prompt_dataset_samples = j.value("prompt_dataset_samples", c.prompt_dataset_samples);
  c.backbone_model = j.value("backbone_model", c.backbone_model);
  c.dataset_description = j.value("dataset_description", c.dataset_description);
  if (j.contains("initial_workflow")) {
    c.initial_workflow = j.at("initial_workflow").get<WorkflowSpec>();
  }
}

}  // namespace flowsearch
