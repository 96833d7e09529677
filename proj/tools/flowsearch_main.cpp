#include <iostream>

#include <CLI11.hpp>

#include "flowsearch/cli/commands.hpp"

using flowsearch::cli::CliOptions;

int main(int argc, char** argv) {
  CLI::App app{"flowsearch: surrogate-assisted search over LLM agent workflows"};
  app.require_subcommand(0, 1);

  bool print_schema = false;
  app.add_flag("--print-schema", print_schema, "print the TOML config schema and exit");

  CliOptions options;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", options.config_path, "TOML config file");
    cmd->add_option("--out", options.out_dir, "output directory");
    cmd->add_option("--seed", options.seed, "seed override");
    cmd->add_option("--rounds", options.rounds, "total rounds T");
    cmd->add_option("--warmup", options.warmup, "warm-up rounds M");
    cmd->add_option("--rho", options.rho, "few-shot budget fraction");
    cmd->add_option("--tau", options.tau, "calibration tolerance");
    cmd->add_option("--gamma", options.gamma, "bin-softmax temperature");
    cmd->add_option("--k-bins", options.k_bins, "difficulty bins");
    cmd->add_option("--alpha-max", options.alpha_max, "calibration weight cap");
    cmd->add_option("--top-k", options.top_k, "workflows in the final report");
  };

  CLI::App* run = app.add_subcommand("run", "run one search");
  add_common(run);
  run->add_option("--dataset", options.dataset_path, "validation set (JSONL)");
  run->add_option("--backend", options.backend, "sim | wire")
      ->check(CLI::IsMember({"sim", "wire"}));
  run->add_option("--init-workflow", options.init_workflow_path,
                  "JSON file overriding the round-1 workflow");

  CLI::App* simulate = app.add_subcommand("simulate", "paired full-exec vs surrogate study");
  add_common(simulate);
  simulate->add_option("--seeds", options.seeds, "number of seeds in the grid");
  simulate->add_option("--queries", options.queries, "synthetic validation-set size");
  simulate->add_option("--backend", options.backend, "sim only")
      ->check(CLI::IsMember({"sim", "wire"}));

  CLI::App* analyze = app.add_subcommand("analyze", "metric tables from run logs");
  analyze->add_option("--log", options.log_paths, "run log path(s)")->expected(-1);
  analyze->add_option("--out", options.out_dir, "output directory");
  analyze->add_option("--top-k", options.top_k, "workflows in coverage/rank tables");

  CLI::App* report = app.add_subcommand("report", "final report from a run log");
  report->add_option("--log", options.log_paths, "run log path");
  report->add_option("--out", options.out_dir, "output directory");
  report->add_option("--top-k", options.top_k, "workflows in the report");

  CLI11_PARSE(app, argc, argv);

  if (print_schema) {
    std::cout << flowsearch::cli::config_schema();
    return flowsearch::cli::kExitOk;
  }

  if (run->parsed()) return flowsearch::cli::run_guarded("run", flowsearch::cli::cmd_run, options);
  if (simulate->parsed())
    return flowsearch::cli::run_guarded("simulate", flowsearch::cli::cmd_simulate, options);
  if (analyze->parsed())
    return flowsearch::cli::run_guarded("analyze", flowsearch::cli::cmd_analyze, options);
  if (report->parsed())
    return flowsearch::cli::run_guarded("report", flowsearch::cli::cmd_report, options);

  std::cout << app.help();
  return flowsearch::cli::kExitOk;
}
