#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowsearch::metrics {

/// Thrown when a metric is mathematically undefined for the given input
/// (constant series, zero difference vectors, ...).
struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pearson correlation of two equal-length series (length >= 2). Errors if
/// either series is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Cosine similarity of the first-difference vectors of two series
/// (length >= 2). Errors if either difference vector is all zero.
double diffcos(std::span<const double> x, std::span<const double> y);

/// Mean absolute difference of two equal-length series (length >= 1).
double mae(std::span<const double> x, std::span<const double> y);

/// Per-query correctness of a set of workflows (rows) over a query set
/// (columns). Entries are scores in [0,1]; binary for exact-match tasks.
struct CorrectnessMatrix {
  std::vector<std::string> row_labels;  // workflow ids or repeat tags
  std::vector<std::string> query_ids;   // column order
  std::vector<std::vector<double>> rows;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return query_ids.size(); }
  void check_rectangular() const;
};

/// Fraction of queries answered (entry >= threshold) by at least one row.
double coverage(const CorrectnessMatrix& matrix, double threshold = 1.0);

struct RankPair {
  std::vector<int> competition;  // 1 + count of strictly better entries
  std::vector<int> dense;        // 1 + count of distinct strictly better values
};

/// Tie-aware ranks of k per-query scores, higher score = better rank.
RankPair query_ranks(std::span<const double> scores);

struct RepeatKResult {
  double mean_performance = 0.0;  // mean of per-repeat accuracies
  double coverage = 0.0;          // coverage over the stacked repeats
};

/// Rows are k repeated executions of one workflow over the same queries.
RepeatKResult repeat_k_analysis(const CorrectnessMatrix& repeats, double threshold = 1.0);

}  // namespace flowsearch::metrics
