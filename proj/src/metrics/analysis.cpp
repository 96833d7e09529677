#include "flowsearch/metrics/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

namespace flowsearch::metrics {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct WorkflowFacts {
  int round = 0;
  double effective = 0.0;
  bool scored = false;
  std::optional<double> s_pred, s_few, s_hat;
  std::optional<double> exec_like;  // full-exec value or audit exec score
  std::optional<std::vector<std::pair<std::string, double>>> per_query;
};

std::vector<std::pair<std::string, double>> rows_from(const json& per_query) {
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& e : per_query) {
    rows.emplace_back(e.at(0).get<std::string>(), e.at(1).get<double>());
  }
  return rows;
}

}  // namespace

std::vector<CostPoint> cumulative_cost_curve(const std::vector<json>& events) {
  std::vector<CostPoint> curve;
  std::int64_t cumulative = 0;
  for (const auto& e : events) {
    if (e.value("type", std::string{}) != "score") continue;
    cumulative += e.at("eval_tokens").get<std::int64_t>();
    curve.push_back({e.at("round").get<int>(), e.at("workflow_id").get<std::string>(),
                     cumulative, e.at("value").get<double>()});
  }
  return curve;
}

AnalysisTables analyze_events(const std::vector<json>& events, int top_k) {
  AnalysisTables tables;
  tables.cost_curve = cumulative_cost_curve(events);

  std::map<std::string, WorkflowFacts> facts;
  std::vector<std::string> order;  // by first appearance
  auto touch = [&](const std::string& id) -> WorkflowFacts& {
    if (facts.find(id) == facts.end()) order.push_back(id);
    return facts[id];
  };

  std::vector<std::vector<double>> repeat_rows;
  std::vector<std::string> repeat_qids;

  for (const auto& e : events) {
    const std::string type = e.value("type", std::string{});
    if (type == "score") {
      auto& f = touch(e.at("workflow_id").get<std::string>());
      f.round = e.at("round").get<int>();
      f.effective = e.at("value").get<double>();
      f.scored = true;
    } else if (type == "exec_full") {
      auto& f = touch(e.at("workflow_id").get<std::string>());
      f.exec_like = e.at("value").get<double>();
      f.per_query = rows_from(e.at("per_query"));
    } else if (type == "calibrate") {
      auto& f = touch(e.at("workflow_id").get<std::string>());
      f.s_pred = e.at("s_pred").get<double>();
      f.s_few = e.at("s_few").get<double>();
      f.s_hat = e.at("s_hat").get<double>();
    } else if (type == "audit") {
      auto& f = touch(e.at("workflow_id").get<std::string>());
      f.exec_like = e.at("exec_score").get<double>();
      if (e.contains("per_query")) f.per_query = rows_from(e.at("per_query"));
    } else if (type == "repeat_exec") {
      auto rows = rows_from(e.at("per_query"));
      if (repeat_qids.empty()) {
        for (const auto& [qid, _] : rows) repeat_qids.push_back(qid);
      }
      std::vector<double> row;
      row.reserve(rows.size());
      for (const auto& [_, s] : rows) row.push_back(s);
      repeat_rows.push_back(std::move(row));
    }
  }

  // agreement: rounds with both surrogate and execution scores, in round order
  std::vector<const WorkflowFacts*> paired;
  for (const auto& id : order) {
    const auto& f = facts.at(id);
    if (f.s_hat.has_value() && f.exec_like.has_value()) paired.push_back(&f);
  }
  std::sort(paired.begin(), paired.end(),
            [](const WorkflowFacts* a, const WorkflowFacts* b) { return a->round < b->round; });
  if (paired.size() < 2) {
    tables.agreement_note =
        "no paired surrogate/execution records (warm-up-only run or missing audit)";
  } else {
    std::vector<double> x;
    for (const auto* f : paired) x.push_back(*f->exec_like);
    auto add_row = [&](const std::string& name, auto getter) {
      std::vector<double> y;
      for (const auto* f : paired) y.push_back(getter(*f));
      AgreementRow row;
      row.surrogate = name;
      row.n = static_cast<int>(y.size());
      try {
        row.pearson = pearson(x, y);
        row.diffcos = diffcos(x, y);
        row.mae = mae(x, y);
        row.defined = true;
      } catch (const MetricError& err) {
        row.defined = false;
        row.note = err.what();
        row.mae = mae(x, y);  // always defined
      }
      tables.agreement.push_back(std::move(row));
    };
    add_row("pred", [](const WorkflowFacts& f) { return *f.s_pred; });
    add_row("few", [](const WorkflowFacts& f) { return *f.s_few; });
    add_row("calibrated", [](const WorkflowFacts& f) { return *f.s_hat; });
  }

  // coverage over top-k workflows that have per-query rows
  std::vector<const WorkflowFacts*> with_rows;
  std::vector<std::string> with_rows_ids;
  for (const auto& id : order) {
    const auto& f = facts.at(id);
    if (f.scored && f.per_query.has_value()) {
      with_rows.push_back(&f);
      with_rows_ids.push_back(id);
    }
  }
  std::vector<std::size_t> idx(with_rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (with_rows[a]->effective != with_rows[b]->effective)
      return with_rows[a]->effective > with_rows[b]->effective;
    if (with_rows[a]->round != with_rows[b]->round) return with_rows[a]->round < with_rows[b]->round;
    return with_rows_ids[a] < with_rows_ids[b];
  });

  if (!idx.empty()) {
    CorrectnessMatrix matrix;
    for (const auto& [qid, _] : *with_rows[idx[0]]->per_query) matrix.query_ids.push_back(qid);
    const int limit = std::min<int>(top_k, static_cast<int>(idx.size()));
    for (int k = 1; k <= limit; ++k) {
      const auto& rows = *with_rows[idx[static_cast<std::size_t>(k - 1)]]->per_query;
      std::map<std::string, double> by_id(rows.begin(), rows.end());
      std::vector<double> row;
      row.reserve(matrix.query_ids.size());
      for (const auto& qid : matrix.query_ids) row.push_back(by_id.at(qid));
      matrix.rows.push_back(std::move(row));
      matrix.row_labels.push_back(with_rows_ids[idx[static_cast<std::size_t>(k - 1)]]);
      tables.coverage_topk.push_back({k, coverage(matrix)});
    }

    // per-query CR/DR across the same top workflows
    if (matrix.n_rows() >= 2) {
      std::vector<double> cr_sum(matrix.n_rows(), 0.0), dr_sum(matrix.n_rows(), 0.0);
      std::vector<double> scores(matrix.n_rows());
      for (std::size_t col = 0; col < matrix.n_cols(); ++col) {
        for (std::size_t r = 0; r < matrix.n_rows(); ++r) scores[r] = matrix.rows[r][col];
        RankPair ranks = query_ranks(scores);
        for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
          cr_sum[r] += ranks.competition[r];
          dr_sum[r] += ranks.dense[r];
        }
      }
      for (std::size_t r = 0; r < matrix.n_rows(); ++r) {
        double perf = 0.0;
        for (double v : matrix.rows[r]) perf += v;
        perf /= static_cast<double>(matrix.n_cols());
        tables.rank_stats.push_back({matrix.row_labels[r], perf,
                                     cr_sum[r] / static_cast<double>(matrix.n_cols()),
                                     dr_sum[r] / static_cast<double>(matrix.n_cols())});
      }
    }
  }

  if (!repeat_rows.empty()) {
    CorrectnessMatrix repeats;
    repeats.query_ids = repeat_qids;
    repeats.rows = repeat_rows;
    tables.repeat_k = repeat_k_analysis(repeats);
    tables.repeat_k_rows = static_cast<int>(repeat_rows.size());
  }

  return tables;
}

json analysis_to_json(const AnalysisTables& tables) {
  json agreement = json::array();
  for (const auto& row : tables.agreement) {
    agreement.push_back(json{{"surrogate", row.surrogate},
                             {"defined", row.defined},
                             {"pearson", row.defined ? json(row.pearson) : json(nullptr)},
                             {"diffcos", row.defined ? json(row.diffcos) : json(nullptr)},
                             {"mae", row.mae},
                             {"n", row.n},
                             {"note", row.note}});
  }
  json coverage = json::array();
  for (const auto& row : tables.coverage_topk) {
    coverage.push_back(json{{"k", row.k}, {"coverage", row.coverage}});
  }
  json ranks = json::array();
  for (const auto& row : tables.rank_stats) {
    ranks.push_back(json{{"workflow_id", row.workflow_id},
                         {"performance", row.performance},
                         {"mean_cr", row.mean_competition_rank},
                         {"mean_dr", row.mean_dense_rank}});
  }
  json curve = json::array();
  for (const auto& p : tables.cost_curve) {
    curve.push_back(json{{"round", p.round},
                         {"workflow_id", p.workflow_id},
                         {"cumulative_eval_tokens", p.cumulative_eval_tokens},
                         {"effective_score", p.effective_score}});
  }
  json j{{"agreement", agreement},
         {"agreement_note", tables.agreement_note},
         {"coverage_topk", coverage},
         {"rank_stats", ranks},
         {"cost_curve", curve}};
  if (tables.repeat_k) {
    j["repeat_k"] = json{{"rows", tables.repeat_k_rows},
                         {"mean_performance", tables.repeat_k->mean_performance},
                         {"coverage", tables.repeat_k->coverage}};
  } else {
    j["repeat_k"] = nullptr;
  }
  return j;
}

void write_analysis_csv(const AnalysisTables& tables, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    std::ofstream out(out_dir / "agreement.csv");
    out << "surrogate,pearson,diffcos,mae,n,note\n";
    if (tables.agreement.empty()) {
      out << "# " << tables.agreement_note << "\n";
    }
    for (const auto& row : tables.agreement) {
      out << row.surrogate << ',' << (row.defined ? fmt(row.pearson) : "undefined") << ','
          << (row.defined ? fmt(row.diffcos) : "undefined") << ',' << fmt(row.mae) << ','
          << row.n << ',' << row.note << "\n";
    }
  }
  {
    std::ofstream out(out_dir / "coverage.csv");
    out << "k,coverage\n";
    for (const auto& row : tables.coverage_topk) {
      out << row.k << ',' << fmt(row.coverage) << "\n";
    }
  }
  {
    std::ofstream out(out_dir / "rank_stats.csv");
    out << "workflow_id,performance,mean_cr,mean_dr\n";
    for (const auto& row : tables.rank_stats) {
      out << row.workflow_id << ',' << fmt(row.performance) << ','
          << fmt(row.mean_competition_rank) << ',' << fmt(row.mean_dense_rank) << "\n";
    }
  }
  if (tables.repeat_k) {
    std::ofstream out(out_dir / "repeat_k.csv");
    out << "rows,mean_performance,coverage\n";
    out << tables.repeat_k_rows << ',' << fmt(tables.repeat_k->mean_performance) << ','
        << fmt(tables.repeat_k->coverage) << "\n";
  }
  {
    std::ofstream out(out_dir / "cost_curve.csv");
    out << "round,workflow_id,cumulative_eval_tokens,effective_score\n";
    for (const auto& p : tables.cost_curve) {
      out << p.round << ',' << p.workflow_id << ',' << p.cumulative_eval_tokens << ','
          << fmt(p.effective_score) << "\n";
    }
  }
}

}  // namespace flowsearch::metrics
