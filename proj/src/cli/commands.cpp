#include "flowsearch/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>

#include "flowsearch/cli/toml.hpp"
#include "flowsearch/core/jsonl.hpp"
#include "flowsearch/metrics/analysis.hpp"
#include "flowsearch/optimizer/optimizer.hpp"
#include "flowsearch/search/search.hpp"

namespace flowsearch::cli {

namespace fs = std::filesystem;

namespace {

const char* kSchema = R"schema(# flowsearch config schema (TOML subset: sections, scalar values, # comments)

[run]
warmup_rounds = 5              # int >= 1: rounds scored by full execution
total_rounds = 20              # int > warmup_rounds
seed = 1                       # int: master seed
top_k = 5                      # int >= 1: workflows in the final report
parallelism = 1                # int >= 1: concurrent query executions
expansion_retries = 3          # int >= 1: optimizer attempts per round
prediction_retries = 3         # int >= 1: self-prediction parse attempts
experience_limit = 0           # int >= 0: edit-history entries in prompts, 0 = all
prediction_history_limit = 8   # int >= 0: (round, score, prediction) records in prompts
prompt_dataset_samples = 3     # int >= 0: dataset rows quoted in prompts
backbone_model = "generic-llm" # name substituted into the evaluation prompt
dataset_description = ""       # free text for the evaluation prompt
backend = "sim"                # "sim" | "wire"

[selection]
lambda = 0.2                   # [0,1]: uniform-mixture weight
alpha_sel = 5.0                # > 0: softmax temperature on score gaps

[sampler]
k_bins = 10                    # int >= 1: difficulty bins over [0,1]
gamma = 0.05                   # > 0: bin-softmax temperature
rho = 0.02                     # (0,1]: few-shot budget fraction
resample_each_round = true     # false: freeze one subset for the whole run

[calibration]
tau = 0.05                     # > 0: tolerance on |pred - few|
alpha_max = 0.5                # (0,1]: cap on the calibration weight

[evaluator]
kind = "exact"                 # "exact" | "numeric" | "wrapped"
tolerance = 0.0                # >= 0, numeric matching
inner = "exact"                # payload evaluator for "wrapped"

[sim]                          # simulated backend
seed = 0                       # 0 = inherit run.seed
salt = 0
base_quality = 0.55
hardness = 0.3
length_penalty = 0.03
length_cap = 7
prompt_tokens_base = 60
prompt_tokens_per_op = 40
prompt_tokens_jitter = 32
completion_tokens_base = 24
completion_tokens_jitter = 16
prediction_bias = 0.05         # simulated optimizer prediction bias
prediction_noise = 0.05        # simulated optimizer prediction noise

[wire]                         # chat-completion backend; FLOWSEARCH_API_BASE /
model = "gpt-4o-mini"          # FLOWSEARCH_API_KEY / FLOWSEARCH_MODEL override
base_url = ""                  # these at run time (secrets live in the env)
path = "/v1/chat/completions"
temperature = 0.0
max_retries = 3
timeout_s = 60
parallelism = 4

[simulate]                     # paired-study command
seeds = 5
queries = 500

[templates]
eval_path = ""                 # file overriding the evaluation template
optimize_path = ""             # file overriding the expansion template
)schema";

template <typename T>
T get_as(const nlohmann::json& v, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: bad value type for " + where);
  }
}

void apply_section(const TomlTable& table, const std::string& section,
                   const std::map<std::string, std::function<void(const nlohmann::json&)>>& keys) {
  auto sit = table.find(section);
  if (sit == table.end()) return;
  for (const auto& [key, value] : sit->second) {
    auto kit = keys.find(key);
    if (kit == keys.end())
      throw ConfigError("config: unknown key [" + section + "] " + key);
    kit->second(value);
  }
}

void require_known_sections(const TomlTable& table, const std::set<std::string>& known) {
  for (const auto& [section, _] : table) {
    if (known.count(section) == 0)
      throw ConfigError("config: unknown section [" + section + "]");
  }
}

}  // namespace

std::string config_schema() { return kSchema; }

LoadedConfig load_config(const CliOptions& options) {
  LoadedConfig out;
  out.sim.seed = 0;  // sentinel: inherit run.seed unless [sim] sets one

  if (!options.config_path.empty()) {
    if (!fs::exists(options.config_path))
      throw ConfigError("config: file does not exist: " + options.config_path);
    TomlTable table = load_toml_file(options.config_path);
    require_known_sections(table, {"", "run", "selection", "sampler", "calibration", "evaluator",
                                   "sim", "wire", "simulate", "templates"});
    if (table.count("") && !table.at("").empty())
      throw ConfigError("config: top-level key outside any section: " +
                        table.at("").begin()->first);

    RunConfig& run = out.run;
    apply_section(table, "run",
        {{"warmup_rounds", [&](auto& v) { run.warmup_rounds = get_as<int>(v, "run.warmup_rounds"); }},
         {"total_rounds", [&](auto& v) { run.total_rounds = get_as<int>(v, "run.total_rounds"); }},
         {"seed", [&](auto& v) { run.seed = get_as<std::uint64_t>(v, "run.seed"); }},
         {"top_k", [&](auto& v) { run.top_k = get_as<int>(v, "run.top_k"); }},
         {"parallelism", [&](auto& v) { run.parallelism = get_as<int>(v, "run.parallelism"); }},
         {"expansion_retries",
          [&](auto& v) { run.expansion_retries = get_as<int>(v, "run.expansion_retries"); }},
         {"prediction_retries",
          [&](auto& v) { run.prediction_retries = get_as<int>(v, "run.prediction_retries"); }},
         {"experience_limit",
          [&](auto& v) { run.experience_limit = get_as<int>(v, "run.experience_limit"); }},
         {"prediction_history_limit",
          [&](auto& v) {
            run.prediction_history_limit = get_as<int>(v, "run.prediction_history_limit");
          }},
         {"prompt_dataset_samples",
          [&](auto& v) {
            run.prompt_dataset_samples = get_as<int>(v, "run.prompt_dataset_samples");
          }},
         {"backbone_model",
          [&](auto& v) { run.backbone_model = get_as<std::string>(v, "run.backbone_model"); }},
         {"dataset_description",
          [&](auto& v) {
            run.dataset_description = get_as<std::string>(v, "run.dataset_description");
          }},
         {"backend", [&](auto& v) { out.backend = get_as<std::string>(v, "run.backend"); }}});

    apply_section(table, "selection",
        {{"lambda", [&](auto& v) { run.selection.lambda = get_as<double>(v, "selection.lambda"); }},
         {"alpha_sel",
          [&](auto& v) { run.selection.alpha_sel = get_as<double>(v, "selection.alpha_sel"); }}});

    apply_section(table, "sampler",
        {{"k_bins", [&](auto& v) { run.sampler.k_bins = get_as<int>(v, "sampler.k_bins"); }},
         {"gamma", [&](auto& v) { run.sampler.gamma = get_as<double>(v, "sampler.gamma"); }},
         {"rho", [&](auto& v) { run.sampler.rho = get_as<double>(v, "sampler.rho"); }},
         {"resample_each_round",
          [&](auto& v) {
            run.sampler.resample_each_round = get_as<bool>(v, "sampler.resample_each_round");
          }}});

    apply_section(table, "calibration",
        {{"tau", [&](auto& v) { run.calibration.tau = get_as<double>(v, "calibration.tau"); }},
         {"alpha_max",
          [&](auto& v) { run.calibration.alpha_max = get_as<double>(v, "calibration.alpha_max"); }}});

    apply_section(table, "evaluator",
        {{"kind",
          [&](auto& v) {
            out.evaluator.kind =
                exec::evaluator_kind_from_string(get_as<std::string>(v, "evaluator.kind"));
          }},
         {"tolerance",
          [&](auto& v) { out.evaluator.tolerance = get_as<double>(v, "evaluator.tolerance"); }},
         {"inner", [&](auto& v) {
            out.evaluator.inner =
                exec::evaluator_kind_from_string(get_as<std::string>(v, "evaluator.inner"));
          }}});

    exec::SimParams& sim = out.sim;
    apply_section(table, "sim",
        {{"seed", [&](auto& v) { sim.seed = get_as<std::uint64_t>(v, "sim.seed"); }},
         {"salt", [&](auto& v) { sim.salt = get_as<std::uint64_t>(v, "sim.salt"); }},
         {"base_quality", [&](auto& v) { sim.base_quality = get_as<double>(v, "sim.base_quality"); }},
         {"hardness", [&](auto& v) { sim.hardness = get_as<double>(v, "sim.hardness"); }},
         {"length_penalty",
          [&](auto& v) { sim.length_penalty = get_as<double>(v, "sim.length_penalty"); }},
         {"length_cap", [&](auto& v) { sim.length_cap = get_as<int>(v, "sim.length_cap"); }},
         {"prompt_tokens_base",
          [&](auto& v) { sim.prompt_tokens_base = get_as<std::int64_t>(v, "sim.prompt_tokens_base"); }},
         {"prompt_tokens_per_op",
          [&](auto& v) {
            sim.prompt_tokens_per_op = get_as<std::int64_t>(v, "sim.prompt_tokens_per_op");
          }},
         {"prompt_tokens_jitter",
          [&](auto& v) {
            sim.prompt_tokens_jitter = get_as<std::int64_t>(v, "sim.prompt_tokens_jitter");
          }},
         {"completion_tokens_base",
          [&](auto& v) {
            sim.completion_tokens_base = get_as<std::int64_t>(v, "sim.completion_tokens_base");
          }},
         {"completion_tokens_jitter",
          [&](auto& v) {
            sim.completion_tokens_jitter = get_as<std::int64_t>(v, "sim.completion_tokens_jitter");
          }},
         {"prediction_bias",
          [&](auto& v) {
            out.sim_optimizer.prediction_bias = get_as<double>(v, "sim.prediction_bias");
          }},
         {"prediction_noise", [&](auto& v) {
            out.sim_optimizer.prediction_noise = get_as<double>(v, "sim.prediction_noise");
          }}});

    exec::WireConfig& wire = out.wire;
    apply_section(table, "wire",
        {{"model", [&](auto& v) { wire.model = get_as<std::string>(v, "wire.model"); }},
         {"base_url", [&](auto& v) { wire.base_url = get_as<std::string>(v, "wire.base_url"); }},
         {"path", [&](auto& v) { wire.path = get_as<std::string>(v, "wire.path"); }},
         {"temperature", [&](auto& v) { wire.temperature = get_as<double>(v, "wire.temperature"); }},
         {"max_retries", [&](auto& v) { wire.max_retries = get_as<int>(v, "wire.max_retries"); }},
         {"timeout_s", [&](auto& v) { wire.timeout_s = get_as<int>(v, "wire.timeout_s"); }},
         {"parallelism", [&](auto& v) { wire.parallelism = get_as<int>(v, "wire.parallelism"); }}});

    apply_section(table, "simulate",
        {{"seeds", [&](auto& v) { out.simulate_seeds = get_as<int>(v, "simulate.seeds"); }},
         {"queries", [&](auto& v) { out.simulate_queries = get_as<int>(v, "simulate.queries"); }}});

    apply_section(table, "templates",
        {{"eval_path",
          [&](auto& v) {
            std::string p = get_as<std::string>(v, "templates.eval_path");
            if (!p.empty()) out.eval_template = opt::TemplateRepo::load_file(p, "eval.file");
          }},
         {"optimize_path", [&](auto& v) {
            std::string p = get_as<std::string>(v, "templates.optimize_path");
            if (!p.empty())
              out.optimize_template = opt::TemplateRepo::load_file(p, "optimize.file");
          }}});
  }

  // CLI overrides
  if (options.seed) out.run.seed = *options.seed;
  if (options.rounds) out.run.total_rounds = *options.rounds;
  if (options.warmup) out.run.warmup_rounds = *options.warmup;
  if (options.rho) out.run.sampler.rho = *options.rho;
  if (options.tau) out.run.calibration.tau = *options.tau;
  if (options.gamma) out.run.sampler.gamma = *options.gamma;
  if (options.k_bins) out.run.sampler.k_bins = *options.k_bins;
  if (options.alpha_max) out.run.calibration.alpha_max = *options.alpha_max;
  if (options.top_k) out.run.top_k = *options.top_k;
  if (options.seeds) out.simulate_seeds = *options.seeds;
  if (options.queries) out.simulate_queries = *options.queries;
  if (!options.backend.empty()) out.backend = options.backend;

  if (!options.init_workflow_path.empty()) {
    if (!fs::exists(options.init_workflow_path))
      throw ConfigError("config: init workflow file does not exist: " +
                        options.init_workflow_path);
    out.run.initial_workflow =
        json::parse(read_text_file(options.init_workflow_path)).get<WorkflowSpec>();
  }

  if (out.backend != "sim" && out.backend != "wire")
    throw ConfigError("config: run.backend must be \"sim\" or \"wire\", got \"" + out.backend +
                      "\"");
  if (out.sim.seed == 0) out.sim.seed = out.run.seed;
  try {
    out.run.validate();
    out.evaluator.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (out.simulate_seeds < 1) throw ConfigError("config: simulate.seeds must be >= 1");
  if (out.simulate_queries < 1) throw ConfigError("config: simulate.queries must be >= 1");
  return out;
}

namespace {

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream outf(path);
  if (!outf) throw IoError("cannot write " + path.string());
  outf << j.dump(2) << '\n';
}

struct SimBundle {
  exec::SimExecutor executor;
  opt::SimOptimizer optimizer;
  SimBundle(const exec::SimParams& params, const QuerySet& dataset,
            const opt::SimOptimizerParams& opt_params, std::uint64_t opt_seed)
      : executor(params),
        optimizer(exec::SimWorkflowModel(params), dataset, OperatorCatalog::standard(),
                  Rng(opt_seed).derive("optimizer"), opt_params) {}
};

void write_run_outputs(const fs::path& out_dir, const search::RunResult& result) {
  write_json_file(out_dir / "report.json", search::report_to_json(result.report));
  fs::create_directories(out_dir / "workflows");
  for (const auto& entry : result.report.top) {
    const WorkflowSpec* w = result.state.find_workflow(entry.workflow_id);
    if (w != nullptr) {
      write_json_file(out_dir / "workflows" / (entry.workflow_id + ".json"), json(*w));
    }
  }
}

}  // namespace

int cmd_run(const CliOptions& options) {
  LoadedConfig cfg = load_config(options);
  if (options.dataset_path.empty())
    throw ConfigError("config: --dataset is required for run");
  if (!fs::exists(options.dataset_path))
    throw ConfigError("config: dataset path does not exist: " + options.dataset_path);

  QuerySet dataset = load_queryset_jsonl(options.dataset_path, Split::kValidation);
  fs::create_directories(options.out_dir);
  EventWriter log(fs::path(options.out_dir) / "run_log.jsonl");

  search::RunResult result;
  if (cfg.backend == "sim") {
    SimBundle bundle(cfg.sim, dataset, cfg.sim_optimizer, cfg.run.seed);
    result = search::run_search(cfg.run, dataset, cfg.evaluator, bundle.executor,
                                bundle.optimizer, &log);
  } else {
    exec::WireConfig wire = exec::WireConfig::from_env(cfg.wire);
    if (wire.base_url.empty())
      throw ConfigError("config: wire backend needs wire.base_url or FLOWSEARCH_API_BASE");
    exec::WireExecutor executor(wire);
    opt::ChatLlmCaller caller(wire);
    opt::LlmOptimizerOptions llm_options;
    llm_options.expansion_retries = cfg.run.expansion_retries;
    llm_options.prediction_retries = cfg.run.prediction_retries;
    llm_options.experience_limit = cfg.run.experience_limit;
    if (cfg.optimize_template) llm_options.optimize_template = *cfg.optimize_template;
    if (cfg.eval_template) llm_options.eval_template = *cfg.eval_template;
    opt::LlmOptimizer optimizer(caller, OperatorCatalog::standard(), llm_options);
    result = search::run_search(cfg.run, dataset, cfg.evaluator, executor, optimizer, &log);
  }

  write_run_outputs(options.out_dir, result);
  std::cout << "run complete: " << result.report.workflows_generated << " workflows, best score "
            << (result.report.top.empty() ? 0.0 : result.report.top[0].score) << "\n";
  return kExitOk;
}

int cmd_simulate(const CliOptions& options) {
  LoadedConfig cfg = load_config(options);
  if (cfg.backend != "sim")
    throw ConfigError("config: simulate supports only the sim backend");

  fs::create_directories(options.out_dir);
  const fs::path out_dir(options.out_dir);
  const int n_queries = cfg.simulate_queries;
  const int m = cfg.run.warmup_rounds;

  std::ofstream comparison(out_dir / "comparison.csv");
  comparison << "seed,best_true_full,best_true_surr,true_gap,queries_full,queries_surr,"
                "surr_stage_queries_per_round,query_reduction,eval_tokens_full,eval_tokens_surr,"
                "token_reduction\n";
  std::ofstream curves(out_dir / "curves.csv");
  curves << "seed,arm,round,workflow_id,cumulative_eval_tokens,effective_score\n";

  double gap_sum = 0.0, token_red_sum = 0.0;
  json per_seed = json::array();

  for (int i = 0; i < cfg.simulate_seeds; ++i) {
    const std::uint64_t seed = cfg.run.seed + static_cast<std::uint64_t>(i);
    QuerySet dataset =
        exec::make_synthetic_queryset(static_cast<std::size_t>(n_queries), seed);
    exec::SimParams sim_params = cfg.sim;
    sim_params.seed = seed;

    RunConfig run_cfg = cfg.run;
    run_cfg.seed = seed;

    auto run_arm = [&](search::EvalMode mode, const std::string& arm,
                       const fs::path& log_path) {
      SimBundle bundle(sim_params, dataset, cfg.sim_optimizer, seed);
      EventWriter log(log_path);
      search::RunResult result = search::run_search(run_cfg, dataset, cfg.evaluator,
                                                    bundle.executor, bundle.optimizer, &log, mode);
      const exec::SimWorkflowModel& model = bundle.executor.model();

      if (mode == search::EvalMode::kTwoStage) {
        // audit: exec + true scores for surrogate-round workflows (analysis only)
        for (const auto& w : result.state.workflows) {
          if (w.round <= m) continue;
          exec::EvalOutcome audit =
              exec::evaluate_full(bundle.executor, w, dataset, cfg.evaluator, run_cfg.parallelism);
          json per_query = json::array();
          for (const auto& [qid, s] : audit.per_query) per_query.push_back(json::array({qid, s}));
          log.emit("audit", json{{"workflow_id", w.id},
                                 {"round", w.round},
                                 {"true_score", model.true_mean_score(w, dataset)},
                                 {"exec_score", audit.mean_score},
                                 {"per_query", per_query}});
        }
      } else if (!result.report.top.empty()) {
        // repeat-k rows of the best workflow (execution-stochasticity analog)
        const WorkflowSpec* best = result.state.find_workflow(result.report.top[0].workflow_id);
        for (int rep = 1; rep <= 5; ++rep) {
          exec::SimParams rep_params = sim_params;
          rep_params.salt = static_cast<std::uint64_t>(rep);
          exec::SimExecutor rep_exec(rep_params);
          exec::EvalOutcome rep_outcome =
              exec::evaluate_full(rep_exec, *best, dataset, cfg.evaluator, run_cfg.parallelism);
          json per_query = json::array();
          for (const auto& [qid, s] : rep_outcome.per_query)
            per_query.push_back(json::array({qid, s}));
          log.emit("repeat_exec", json{{"workflow_id", best->id},
                                       {"repeat", rep},
                                       {"value", rep_outcome.mean_score},
                                       {"per_query", per_query}});
        }
      }

      double best_true = 0.0;
      if (!result.report.top.empty()) {
        const WorkflowSpec* best = result.state.find_workflow(result.report.top[0].workflow_id);
        best_true = model.true_mean_score(*best, dataset);
      }
      auto events = read_event_log(log_path);
      for (const auto& p : metrics::cumulative_cost_curve(events)) {
        curves << seed << ',' << arm << ',' << p.round << ',' << p.workflow_id << ','
               << p.cumulative_eval_tokens << ',' << p.effective_score << "\n";
      }
      return std::make_pair(result, best_true);
    };

    auto [full_result, best_true_full] =
        run_arm(search::EvalMode::kFullExecOnly, "full",
                out_dir / ("runlog_full_seed" + std::to_string(seed) + ".jsonl"));
    auto [surr_result, best_true_surr] =
        run_arm(search::EvalMode::kTwoStage, "surrogate",
                out_dir / ("runlog_surr_seed" + std::to_string(seed) + ".jsonl"));

    std::int64_t queries_full = 0, queries_surr = 0;
    for (const auto& [id, rec] : full_result.state.effective) queries_full += rec.n_queries;
    for (const auto& [id, rec] : surr_result.state.effective) queries_surr += rec.n_queries;
    const std::int64_t budget = static_cast<std::int64_t>(
        surrogate::fewshot_budget(run_cfg.sampler.rho, dataset.size()));

    const double gap = best_true_full - best_true_surr;
    const std::int64_t tokens_full = full_result.report.ledger.execute_full +
                                     full_result.report.ledger.execute_few +
                                     full_result.report.ledger.predict;
    const std::int64_t tokens_surr = surr_result.report.ledger.execute_full +
                                     surr_result.report.ledger.execute_few +
                                     surr_result.report.ledger.predict;
    const double query_reduction =
        1.0 - static_cast<double>(queries_surr) / static_cast<double>(queries_full);
    const double token_reduction =
        1.0 - static_cast<double>(tokens_surr) / static_cast<double>(tokens_full);
    gap_sum += gap;
    token_red_sum += token_reduction;

    comparison << seed << ',' << best_true_full << ',' << best_true_surr << ',' << gap << ','
               << queries_full << ',' << queries_surr << ',' << budget << ','
               << query_reduction << ',' << tokens_full << ',' << tokens_surr << ','
               << token_reduction << "\n";
    per_seed.push_back(json{{"seed", seed},
                            {"best_true_full", best_true_full},
                            {"best_true_surr", best_true_surr},
                            {"true_gap", gap},
                            {"queries_full", queries_full},
                            {"queries_surr", queries_surr},
                            {"token_reduction", token_reduction}});
  }

  json study{{"seeds", cfg.simulate_seeds},
             {"queries", n_queries},
             {"mean_true_gap", gap_sum / cfg.simulate_seeds},
             {"mean_token_reduction", token_red_sum / cfg.simulate_seeds},
             {"per_seed", per_seed}};
  write_json_file(out_dir / "study.json", study);
  std::cout << "simulate complete: mean true gap " << study["mean_true_gap"]
            << ", mean token reduction " << study["mean_token_reduction"] << "\n";
  return kExitOk;
}

int cmd_analyze(const CliOptions& options) {
  if (options.log_paths.empty()) throw ConfigError("config: analyze needs at least one --log");
  for (const auto& p : options.log_paths) {
    if (!fs::exists(p)) throw ConfigError("config: log path does not exist: " + p);
  }
  const int top_k = options.top_k.value_or(5);
  fs::create_directories(options.out_dir);
  const bool multiple = options.log_paths.size() > 1;
  for (const auto& p : options.log_paths) {
    auto events = read_event_log(p);
    metrics::AnalysisTables tables = metrics::analyze_events(events, top_k);
    fs::path dir = multiple ? fs::path(options.out_dir) / fs::path(p).stem()
                            : fs::path(options.out_dir);
    metrics::write_analysis_csv(tables, dir);
    write_json_file(dir / "analysis.json", metrics::analysis_to_json(tables));
    for (const auto& e : events) {
      if (e.value("type", std::string{}) == "profile") {
        write_json_file(dir / "difficulty_profile.json", e.at("profile"));
        break;
      }
    }
  }
  std::cout << "analyze complete: " << options.log_paths.size() << " log(s)\n";
  return kExitOk;
}

int cmd_report(const CliOptions& options) {
  if (options.log_paths.size() != 1) throw ConfigError("config: report needs exactly one --log");
  if (!fs::exists(options.log_paths[0]))
    throw ConfigError("config: log path does not exist: " + options.log_paths[0]);
  auto events = read_event_log(options.log_paths[0]);
  search::SearchState state = search::replay_state(events);

  int top_k = options.top_k.value_or(5);
  for (const auto& e : events) {
    if (e.value("type", std::string{}) == "run_start" && !options.top_k) {
      RunConfig cfg;
      e.at("config").get_to(cfg);
      top_k = cfg.top_k;
    }
  }

  search::RunReport report;
  report.top = search::top_k(state, top_k);
  report.ledger = state.ledger.current(state.round);
  report.rounds_completed = state.round;
  report.workflows_generated = static_cast<int>(state.workflows.size());
  report.aborted_rounds = static_cast<int>(events_of_type(events, "round_aborted").size());

  fs::create_directories(options.out_dir);
  write_json_file(fs::path(options.out_dir) / "report.json", search::report_to_json(report));
  metrics::AnalysisTables tables;
  tables.cost_curve = metrics::cumulative_cost_curve(events);
  {
    std::ofstream out(fs::path(options.out_dir) / "cost_curve.csv");
    out << "round,workflow_id,cumulative_eval_tokens,effective_score\n";
    for (const auto& p : tables.cost_curve) {
      out << p.round << ',' << p.workflow_id << ',' << p.cumulative_eval_tokens << ','
          << p.effective_score << "\n";
    }
  }
  std::cout << "report written to " << options.out_dir << "\n";
  return kExitOk;
}

int run_guarded(const char* command, int (*body)(const CliOptions&), const CliOptions& options) {
  try {
    return body(options);
  } catch (const ConfigError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const TomlError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const LogSchemaError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const JsonlParseError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace flowsearch::cli
