#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "flowsearch/cli/toml.hpp"
#include "flowsearch/core/event_log.hpp"
#include "flowsearch/core/jsonl.hpp"
#include "flowsearch/exec/sim.hpp"

using namespace flowsearch;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path capture =
      fs::temp_directory_path() / ("flowsearch_cli_out_" + std::to_string(counter++) + ".txt");
  const std::string command =
      std::string(FLOWSEARCH_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.output = read_text_file(capture);
  fs::remove(capture);
  return result;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_dataset(const fs::path& dir, std::size_t n) {
  const fs::path path = dir / "dataset.jsonl";
  save_queryset_jsonl(path, exec::make_synthetic_queryset(n, 5));
  return path;
}

}  // namespace

TEST_CASE("run: tiny sim search completes quickly with all artifacts") {
  const fs::path dir = fresh_dir("flowsearch_cli_run");
  const fs::path dataset = write_dataset(dir, 20);

  const auto started = std::chrono::steady_clock::now();
  auto result = run_cli("run --dataset " + dataset.string() + " --out " + (dir / "out").string() +
                        " --rounds 5 --warmup 2 --rho 0.1 --seed 3");
  const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
      std::chrono::steady_clock::now() - started);
  CHECK(result.exit_code == 0);
  CHECK(elapsed.count() < 10);
  CHECK(fs::exists(dir / "out" / "report.json"));
  CHECK(fs::exists(dir / "out" / "run_log.jsonl"));
  CHECK(fs::directory_iterator(dir / "out" / "workflows") != fs::directory_iterator());

  // input dataset untouched
  CHECK(read_text_file(dataset).find("synthetic task 1") != std::string::npos);
}

TEST_CASE("run: missing dataset path exits 2 and names the path") {
  auto result = run_cli("run --dataset /nonexistent/ds.jsonl --out /tmp/fs_x");
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("/nonexistent/ds.jsonl") != std::string::npos);
}

TEST_CASE("run: identical seed gives byte-identical outputs") {
  const fs::path dir = fresh_dir("flowsearch_cli_det");
  const fs::path dataset = write_dataset(dir, 25);
  const std::string args = "run --dataset " + dataset.string() +
                           " --rounds 6 --warmup 2 --rho 0.1 --seed 12 --out ";
  CHECK(run_cli(args + (dir / "a").string()).exit_code == 0);
  CHECK(run_cli(args + (dir / "b").string()).exit_code == 0);
  CHECK(read_text_file(dir / "a" / "report.json") == read_text_file(dir / "b" / "report.json"));
  CHECK(read_text_file(dir / "a" / "run_log.jsonl") ==
        read_text_file(dir / "b" / "run_log.jsonl"));
}

TEST_CASE("run: TOML config drives the search; unknown keys are named") {
  const fs::path dir = fresh_dir("flowsearch_cli_cfg");
  const fs::path dataset = write_dataset(dir, 20);

  {
    std::ofstream config(dir / "good.toml");
    config << "[run]\ntotal_rounds = 5\nwarmup_rounds = 2\nseed = 9\n"
           << "[sampler]\nrho = 0.1\nk_bins = 5\n[calibration]\ntau = 0.1\n";
  }
  auto ok = run_cli("run --config " + (dir / "good.toml").string() + " --dataset " +
                    dataset.string() + " --out " + (dir / "out").string());
  CHECK(ok.exit_code == 0);
  auto events = read_event_log(dir / "out" / "run_log.jsonl");
  CHECK(events.at(0).at("config").at("total_rounds") == 5);
  CHECK(events.at(0).at("config").at("sampler").at("k_bins") == 5);

  {
    std::ofstream config(dir / "bad.toml");
    config << "[run]\ntotal_runds = 5\n";
  }
  auto bad = run_cli("run --config " + (dir / "bad.toml").string() + " --dataset " +
                     dataset.string() + " --out " + (dir / "out2").string());
  CHECK(bad.exit_code == 2);
  CHECK(bad.output.find("total_runds") != std::string::npos);

  {
    std::ofstream config(dir / "invalid.toml");
    config << "[run]\nwarmup_rounds = 9\ntotal_rounds = 4\n";
  }
  auto invalid = run_cli("run --config " + (dir / "invalid.toml").string() + " --dataset " +
                         dataset.string() + " --out " + (dir / "out3").string());
  CHECK(invalid.exit_code == 2);
  CHECK(invalid.output.find("total_rounds") != std::string::npos);
}

TEST_CASE("print-schema describes every section") {
  auto result = run_cli("--print-schema");
  CHECK(result.exit_code == 0);
  for (const char* section :
       {"[run]", "[selection]", "[sampler]", "[calibration]", "[evaluator]", "[sim]", "[wire]"}) {
    CHECK(result.output.find(section) != std::string::npos);
  }
}

TEST_CASE("simulate: paired study artifacts and query accounting") {
  const fs::path dir = fresh_dir("flowsearch_cli_sim");
  auto result = run_cli("simulate --out " + dir.string() +
                        " --seeds 2 --queries 50 --rounds 7 --warmup 3 --rho 0.02 --seed 21");
  CHECK(result.exit_code == 0);

  // 2 paired rows plus header
  std::ifstream comparison(dir / "comparison.csv");
  std::string line;
  int rows = 0;
  std::getline(comparison, line);
  CHECK(line.find("seed,") == 0);
  while (std::getline(comparison, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 2);

  // surrogate rounds execute exactly ceil(0.02 * 50) = 1 query
  auto events = read_event_log(dir / "runlog_surr_seed21.jsonl");
  auto fewshots = events_of_type(events, "fewshot");
  CHECK(fewshots.size() == 4);  // rounds 4..7
  for (const auto& e : fewshots) CHECK(e.at("n_queries").get<int>() == 1);

  // audit events exist for surrogate-round workflows
  CHECK_FALSE(events_of_type(events, "audit").empty());
  CHECK(fs::exists(dir / "study.json"));
  CHECK(fs::exists(dir / "curves.csv"));
}

TEST_CASE("simulate: rho = 1 degenerates to full-set execution per round") {
  const fs::path dir = fresh_dir("flowsearch_cli_sim_rho1");
  auto result = run_cli("simulate --out " + dir.string() +
                        " --seeds 1 --queries 30 --rounds 5 --warmup 2 --rho 1.0 --seed 31");
  CHECK(result.exit_code == 0);
  auto events = read_event_log(dir / "runlog_surr_seed31.jsonl");
  for (const auto& e : events_of_type(events, "fewshot")) {
    CHECK(e.at("n_queries").get<int>() == 30);
  }
}

TEST_CASE("simulate: wire backend refused") {
  auto result = run_cli("simulate --backend wire --out /tmp/fs_refuse");
  CHECK(result.exit_code == 2);
  CHECK(result.output.find("sim") != std::string::npos);
}

TEST_CASE("analyze: agreement tables, warm-up-only note, and schema errors") {
  const fs::path dir = fresh_dir("flowsearch_cli_an");
  auto sim = run_cli("simulate --out " + dir.string() +
                     " --seeds 1 --queries 40 --rounds 8 --warmup 3 --rho 0.05 --seed 41");
  REQUIRE(sim.exit_code == 0);

  // surrogate log has audit events -> agreement rows present
  auto surr = run_cli("analyze --log " + (dir / "runlog_surr_seed41.jsonl").string() + " --out " +
                      (dir / "an_surr").string());
  CHECK(surr.exit_code == 0);
  const std::string agreement = read_text_file(dir / "an_surr" / "agreement.csv");
  CHECK(agreement.find("pred,") != std::string::npos);
  CHECK(agreement.find("few,") != std::string::npos);
  CHECK(agreement.find("calibrated,") != std::string::npos);
  CHECK(fs::exists(dir / "an_surr" / "coverage.csv"));
  CHECK(fs::exists(dir / "an_surr" / "analysis.json"));
  // the frozen difficulty profile is surfaced for audit
  json profile = json::parse(read_text_file(dir / "an_surr" / "difficulty_profile.json"));
  CHECK(profile.at("k_bins") == 10);
  CHECK(profile.at("query_ids").size() == 40);

  // full-exec log has no surrogate records -> explanatory note instead
  auto full = run_cli("analyze --log " + (dir / "runlog_full_seed41.jsonl").string() + " --out " +
                      (dir / "an_full").string());
  CHECK(full.exit_code == 0);
  json analysis = json::parse(read_text_file(dir / "an_full" / "analysis.json"));
  CHECK(analysis.at("agreement").empty());
  CHECK_FALSE(analysis.at("agreement_note").get<std::string>().empty());
  // repeat rows recorded by simulate for the full arm
  CHECK_FALSE(analysis.at("repeat_k").is_null());

  // corrupted log -> exit 4
  {
    std::ofstream bad(dir / "bad.jsonl");
    bad << R"({"v":99,"seq":0,"type":"run_start"})" << "\n";
  }
  auto corrupt = run_cli("analyze --log " + (dir / "bad.jsonl").string() + " --out " +
                         (dir / "an_bad").string());
  CHECK(corrupt.exit_code == 4);
}

TEST_CASE("report: rebuilt from the log, idempotent") {
  const fs::path dir = fresh_dir("flowsearch_cli_rep");
  const fs::path dataset = write_dataset(dir, 20);
  auto run = run_cli("run --dataset " + dataset.string() + " --out " + (dir / "out").string() +
                     " --rounds 5 --warmup 2 --rho 0.1 --seed 51");
  REQUIRE(run.exit_code == 0);

  auto rep1 = run_cli("report --log " + (dir / "out" / "run_log.jsonl").string() + " --out " +
                      (dir / "rep1").string());
  CHECK(rep1.exit_code == 0);
  auto rep2 = run_cli("report --log " + (dir / "out" / "run_log.jsonl").string() + " --out " +
                      (dir / "rep2").string());
  CHECK(rep2.exit_code == 0);
  CHECK(read_text_file(dir / "rep1" / "report.json") ==
        read_text_file(dir / "rep2" / "report.json"));

  // report agrees with the run's own report on the top entry
  json original = json::parse(read_text_file(dir / "out" / "report.json"));
  json rebuilt = json::parse(read_text_file(dir / "rep1" / "report.json"));
  CHECK(original.at("top") == rebuilt.at("top"));
  CHECK(fs::exists(dir / "rep1" / "cost_curve.csv"));
}

TEST_CASE("toml parser: values, comments, and errors") {
  using cli::parse_toml;
  auto table = parse_toml("# header\n[a]\nx = 1\ny = 2.5\nz = \"s # not comment\"\nw = true\n");
  CHECK(table.at("a").at("x") == 1);
  CHECK(table.at("a").at("y") == 2.5);
  CHECK(table.at("a").at("z") == "s # not comment");
  CHECK(table.at("a").at("w") == true);

  CHECK_THROWS_AS(parse_toml("[a\nx = 1\n"), cli::TomlError);
  CHECK_THROWS_AS(parse_toml("just text\n"), cli::TomlError);
  CHECK_THROWS_AS(parse_toml("[a]\nx = \n"), cli::TomlError);
  CHECK_THROWS_AS(parse_toml("[a]\nx = 1\nx = 2\n"), cli::TomlError);
  CHECK_THROWS_AS(parse_toml("[a]\nx = 1e\n"), cli::TomlError);
}
