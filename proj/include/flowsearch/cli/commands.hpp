#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowsearch/core/config.hpp"
#include "flowsearch/exec/evaluator.hpp"
#include "flowsearch/exec/sim.hpp"
#include "flowsearch/exec/wire.hpp"
#include "flowsearch/optimizer/sim_optimizer.hpp"
#include "flowsearch/optimizer/templates.hpp"

namespace flowsearch::cli {

// exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitParse = 4;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CliOptions {
  std::string config_path;
  std::string dataset_path;
  std::string out_dir = "out";
  std::string backend;  // "sim" | "wire"; empty = config/default
  std::optional<std::uint64_t> seed;
  std::optional<int> rounds, warmup, k_bins, top_k, seeds, queries;
  std::optional<double> rho, tau, gamma, alpha_max;
  std::vector<std::string> log_paths;
  std::string init_workflow_path;
};

/// Everything a command needs, resolved from config file + CLI overrides.
struct LoadedConfig {
  RunConfig run;
  exec::EvaluatorSpec evaluator;
  exec::SimParams sim;
  opt::SimOptimizerParams sim_optimizer;
  exec::WireConfig wire;
  std::string backend = "sim";
  int simulate_seeds = 5;
  int simulate_queries = 500;
  std::optional<opt::Template> eval_template;      // file overrides
  std::optional<opt::Template> optimize_template;
};

/// Parses and validates; unknown sections/keys are errors naming the key.
LoadedConfig load_config(const CliOptions& options);

/// The documented TOML schema (--print-schema).
std::string config_schema();

int cmd_run(const CliOptions& options);
int cmd_simulate(const CliOptions& options);
int cmd_analyze(const CliOptions& options);
int cmd_report(const CliOptions& options);

/// Maps exceptions onto the documented exit codes.
int run_guarded(const char* command, int (*body)(const CliOptions&), const CliOptions& options);

}  // namespace flowsearch::cli
