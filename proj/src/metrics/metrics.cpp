#include "flowsearch/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace flowsearch::metrics {

namespace {

void require_paired(std::span<const double> x, std::span<const double> y, std::size_t min_len) {
  if (x.size() != y.size()) throw MetricError("series lengths differ");
  if (x.size() < min_len)
    throw MetricError("series too short (need >= " + std::to_string(min_len) + ")");
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, 2);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw MetricError("pearson undefined for constant series");
  return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

double diffcos(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, 2);
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    const double dx = x[t] - x[t - 1];
    const double dy = y[t] - y[t - 1];
    dot += dx * dy;
    nx += dx * dx;
    ny += dy * dy;
  }
  if (nx == 0.0 || ny == 0.0) throw MetricError("diffcos undefined for constant series");
  return dot / (std::sqrt(nx) * std::sqrt(ny));
}

double mae(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::abs(x[i] - y[i]);
  return sum / static_cast<double>(x.size());
}

void CorrectnessMatrix::check_rectangular() const {
  for (const auto& row : rows) {
    if (row.size() != query_ids.size())
      throw MetricError("correctness matrix is not rectangular");
  }
  if (!row_labels.empty() && row_labels.size() != rows.size())
    throw MetricError("row label count does not match row count");
}

double coverage(const CorrectnessMatrix& matrix, double threshold) {
  matrix.check_rectangular();
  if (matrix.n_rows() == 0 || matrix.n_cols() == 0)
    throw MetricError("coverage of an empty matrix");
  std::size_t covered = 0;
  for (std::size_t col = 0; col < matrix.n_cols(); ++col) {
    for (const auto& row : matrix.rows) {
      if (row[col] >= threshold) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(matrix.n_cols());
}

RankPair query_ranks(std::span<const double> scores) {
  if (scores.empty()) throw MetricError("query_ranks of empty score list");
  RankPair ranks;
  ranks.competition.reserve(scores.size());
  ranks.dense.reserve(scores.size());
  for (double s : scores) {
    int better = 0;
    std::set<double> distinct_better;
    for (double other : scores) {
      if (other > s) {
        ++better;
        distinct_better.insert(other);
      }
    }
    ranks.competition.push_back(1 + better);
    ranks.dense.push_back(1 + static_cast<int>(distinct_better.size()));
  }
  return ranks;
}

RepeatKResult repeat_k_analysis(const CorrectnessMatrix& repeats, double threshold) {
  repeats.check_rectangular();
  if (repeats.n_rows() == 0 || repeats.n_cols() == 0)
    throw MetricError("repeat_k_analysis of an empty matrix");
  RepeatKResult result;
  double sum = 0.0;
  for (const auto& row : repeats.rows) {
    double acc = 0.0;
    for (double v : row) acc += v;
    sum += acc / static_cast<double>(row.size());
  }
  result.mean_performance = sum / static_cast<double>(repeats.n_rows());
  result.coverage = coverage(repeats, threshold);
  return result;
}

}  // namespace flowsearch::metrics
