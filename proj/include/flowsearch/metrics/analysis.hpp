#pragma once

#include <filesystem>
#include <optional>

#include "flowsearch/core/event_log.hpp"
#include "flowsearch/metrics/metrics.hpp"

namespace flowsearch::metrics {

/// One point of the cumulative evaluation-cost curve: tokens spent evaluating
/// all candidates up to and including this one (full execution, few-shot
/// execution, and prediction calls), with the candidate's effective score.
struct CostPoint {
  int round = 0;
  std::string workflow_id;
  std::int64_t cumulative_eval_tokens = 0;
  double effective_score = 0.0;
};

/// Built from a replayable run log; one point per evaluated candidate, token
/// column monotone non-decreasing.
std::vector<CostPoint> cumulative_cost_curve(const std::vector<json>& events);

struct AgreementRow {
  std::string surrogate;  // "pred" | "few" | "calibrated"
  bool defined = false;
  double pearson = 0.0;
  double diffcos = 0.0;
  double mae = 0.0;
  int n = 0;
  std::string note;
};

struct CoverageRow {
  int k = 0;
  double coverage = 0.0;
};

struct RankRow {
  std::string workflow_id;
  double performance = 0.0;
  double mean_competition_rank = 0.0;
  double mean_dense_rank = 0.0;
};

struct AnalysisTables {
  std::vector<AgreementRow> agreement;
  std::string agreement_note;  // set when no paired records exist
  std::vector<CoverageRow> coverage_topk;
  std::vector<RankRow> rank_stats;
  std::optional<RepeatKResult> repeat_k;
  int repeat_k_rows = 0;
  std::vector<CostPoint> cost_curve;
};

/// Derives the full analysis from one run log. Agreement pairs surrogate
/// records (calibrate events) with execution scores of the same workflows
/// (audit events when present); coverage and rank tables use whatever
/// workflows have per-query correctness rows.
AnalysisTables analyze_events(const std::vector<json>& events, int top_k);

json analysis_to_json(const AnalysisTables& tables);

/// Writes agreement.csv, coverage.csv, rank_stats.csv, repeat_k.csv (when
/// present), and cost_curve.csv under out_dir.
void write_analysis_csv(const AnalysisTables& tables, const std::filesystem::path& out_dir);

}  // namespace flowsearch::metrics
