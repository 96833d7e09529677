#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "flowsearch/core/rng.hpp"
#include "flowsearch/surrogate/calibrate.hpp"
#include "flowsearch/surrogate/profile.hpp"
#include "flowsearch/surrogate/sampler.hpp"
#include "flowsearch/surrogate/surrogate.hpp"
#include "support/test_support.hpp"

using namespace flowsearch;
using namespace flowsearch::surrogate;

namespace {

// Independent softmax route: p_k = 1 / sum_j exp(gamma * (n_j - n_k)).
// Algebraically identical to the count softmax, numerically stable.
std::vector<double> ref_bin_distribution(const std::vector<int>& counts, double gamma) {
  std::vector<double> p(counts.size(), 0.0);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    long double denom = 0.0L;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      if (counts[j] == 0) continue;
      denom += std::exp((long double)gamma * (counts[j] - counts[k]));
    }
    p[k] = static_cast<double>(1.0L / denom);
  }
  return p;
}

DifficultyProfile profile_from_counts(const std::vector<int>& counts) {
  DifficultyProfile profile;
  profile.k_bins = static_cast<int>(counts.size());
  int query = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double mid = (static_cast<double>(k) + 0.5) / static_cast<double>(counts.size());
    for (int i = 0; i < counts[k]; ++i) {
      profile.query_ids.push_back("q" + std::to_string(++query));
      profile.mean_scores.push_back(mid);
      profile.bin_of_query.push_back(static_cast<int>(k) + 1);
    }
  }
  profile.bin_counts = counts;
  return profile;
}

}  // namespace

TEST_CASE("bin_index: boundaries tile [0,1] exactly") {
  CHECK(bin_index(0.0, 10) == 1);
  CHECK(bin_index(1.0, 10) == 10);  // last interval closed at 1
  for (int k_bins : {1, 2, 3, 7, 10, 16}) {
    for (int k = 0; k <= k_bins; ++k) {
      const double boundary = static_cast<double>(k) / k_bins;
      const int bin = bin_index(boundary, k_bins);
      CHECK(bin >= 1);
      CHECK(bin <= k_bins);
      if (k < k_bins) CHECK(bin == k + 1);  // [k/K, (k+1)/K) opens bin k+1
    }
  }
  CHECK(bin_index(0.75, 10) == 8);  // [0.7, 0.8)
  CHECK_THROWS_AS(bin_index(-0.1, 10), std::invalid_argument);
  CHECK_THROWS_AS(bin_index(1.1, 10), std::invalid_argument);
}

TEST_CASE("difficulty profile: means, assignments, counts") {
  // 3 queries, M = 4 warm-up workflows
  std::vector<PerQueryScores> rows(4);
  const std::vector<double> w_scores_q2{1, 0, 1, 1};  // mean 0.75
  for (int m = 0; m < 4; ++m) {
    rows[m] = {{"a", 1.0},                  // solved by all -> top bin
               {"b", w_scores_q2[m]},       // 0.75 -> bin 8
               {"c", 0.0}};                 // solved by none -> bottom bin
  }
  DifficultyProfile profile = build_difficulty_profile(rows, 10);
  REQUIRE(profile.n_queries() == 3);
  CHECK(profile.mean_scores[0] == 1.0);
  CHECK(profile.bin_of_query[0] == 10);
  CHECK(profile.mean_scores[1] == doctest::Approx(0.75));
  CHECK(profile.bin_of_query[1] == 8);
  CHECK(profile.bin_interval(8).first == doctest::Approx(0.7));
  CHECK(profile.bin_interval(8).second == doctest::Approx(0.8));
  CHECK(profile.mean_scores[2] == 0.0);
  CHECK(profile.bin_of_query[2] == 1);

  int total = 0;
  for (int n : profile.bin_counts) total += n;
  CHECK(total == 3);

  // missing per-query scores
  std::vector<PerQueryScores> mismatched = rows;
  mismatched[2].pop_back();
  CHECK_THROWS_AS(build_difficulty_profile(mismatched, 10), std::invalid_argument);
  std::vector<PerQueryScores> renamed = rows;
  renamed[1][0].first = "zz";
  CHECK_THROWS_AS(build_difficulty_profile(renamed, 10), std::invalid_argument);
}

TEST_CASE("difficulty profile: JSON round trip") {
  std::vector<PerQueryScores> rows(2);
  for (int m = 0; m < 2; ++m) {
    for (int q = 1; q <= 7; ++q) {
      rows[m].push_back({"q" + std::to_string(q), (q + m) % 2 ? 1.0 : 0.0});
    }
  }
  DifficultyProfile profile = build_difficulty_profile(rows, 5);
  json j(profile);
  CHECK(j.contains("bin_edges"));
  CHECK(j.at("bin_edges").size() == 6);
  CHECK(j.get<DifficultyProfile>() == profile);
}

TEST_CASE("bin_distribution: uniform, printed example, and limits") {
  std::vector<int> equal{7, 7, 7, 7};
  auto p = bin_distribution(equal, 0.3);
  for (double v : p) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

  // two bins, counts 90/10, gamma 0.05
  std::vector<int> skew{90, 10};
  auto q = bin_distribution(skew, 0.05);
  CHECK(q[0] == doctest::Approx(0.982).epsilon(1e-3));
  CHECK(q[1] == doctest::Approx(0.018).epsilon(5e-2));
  CHECK(q[0] + q[1] == doctest::Approx(1.0).epsilon(1e-12));

  // gamma -> 0+ approaches uniform
  auto tiny = bin_distribution(skew, 1e-9);
  CHECK(std::abs(tiny[0] - 0.5) < 1e-6);
  CHECK(std::abs(tiny[1] - 0.5) < 1e-6);

  CHECK_THROWS_AS(bin_distribution(skew, 0.0), std::invalid_argument);
  std::vector<int> empty_bins{0, 0};
  CHECK_THROWS_AS(bin_distribution(empty_bins, 0.1), std::invalid_argument);
}

TEST_CASE("bin_distribution: empty bins get zero probability, rest renormalizes") {
  std::vector<int> counts{5, 0, 5, 0};
  auto p = bin_distribution(counts, 0.2);
  CHECK(p[1] == 0.0);
  CHECK(p[3] == 0.0);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("bin_distribution matches the independent route, including huge counts") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(9);
    std::vector<int> counts(k);
    const bool huge = trial % 3 == 0;
    for (auto& n : counts) {
      n = static_cast<int>(rng.uniform_index(huge ? 1000000 : 300));
    }
    counts[rng.uniform_index(k)] = huge ? 1000000 : 299;  // at least one occupied
    const double gamma = huge ? 1.0 : 0.001 + rng.uniform() * 0.5;
    auto p = bin_distribution(counts, gamma);
    auto ref = ref_bin_distribution(counts, gamma);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(std::abs(p[i] - ref[i]) < 1e-12);
      CHECK(std::isfinite(p[i]));
      sum += p[i];
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("fewshot budget: ceiling rule and bounds") {
  CHECK(fewshot_budget(0.02, 500) == 10);
  CHECK(fewshot_budget(0.02, 501) == 11);  // ceil
  CHECK(fewshot_budget(0.001, 100) == 1);  // at least one
  CHECK(fewshot_budget(1.0, 100) == 100);
  CHECK_THROWS_AS(fewshot_budget(1.5, 100), std::invalid_argument);
}

TEST_CASE("sample_fewshot: single-bin degeneracy is uniform without replacement") {
  auto profile = profile_from_counts({12});
  Rng rng(4);
  auto picked = sample_fewshot_n(profile, 0.05, 5, rng);
  CHECK(picked.size() == 5);
  std::set<std::string> distinct(picked.begin(), picked.end());
  CHECK(distinct.size() == 5);
}

TEST_CASE("sample_fewshot: full budget returns the whole validation set") {
  auto profile = profile_from_counts({4, 3, 5});
  Rng rng(9);
  auto picked = sample_fewshot_n(profile, 0.05, 12, rng);
  CHECK(picked.size() == 12);
  std::set<std::string> distinct(picked.begin(), picked.end());
  CHECK(distinct.size() == 12);
  CHECK_THROWS_AS(sample_fewshot_n(profile, 0.05, 13, rng), std::invalid_argument);
}

TEST_CASE("sample_fewshot: sets have exact size and no duplicates on random profiles") {
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 1 + rng.uniform_index(10);
    std::vector<int> counts(k, 0);
    int total = 0;
    for (auto& n : counts) {
      n = static_cast<int>(rng.uniform_index(9));
      total += n;
    }
    if (total == 0) {
      counts[0] = 1;
      total = 1;
    }
    auto profile = profile_from_counts(counts);
    const std::size_t budget = 1 + rng.uniform_index(static_cast<std::size_t>(total));
    const double gamma = 0.01 + rng.uniform();
    auto picked = sample_fewshot_n(profile, gamma, budget, rng);
    CHECK(picked.size() == budget);
    std::set<std::string> distinct(picked.begin(), picked.end());
    CHECK(distinct.size() == budget);
  }
}

TEST_CASE("sample_fewshot: deterministic under the seed") {
  auto profile = profile_from_counts({30, 10, 25});
  Rng a(77), b(77), c(78);
  auto pa = sample_fewshot_n(profile, 0.05, 9, a);
  auto pb = sample_fewshot_n(profile, 0.05, 9, b);
  auto pc = sample_fewshot_n(profile, 0.05, 9, c);
  CHECK(pa == pb);
  CHECK(pa != pc);
}

TEST_CASE("sample_fewshot: first-draw bin frequency matches the softmax") {
  // two bins, counts 90/10, gamma 0.05: p1 ~ 0.982
  auto profile = profile_from_counts({90, 10});
  const auto p = bin_distribution(profile, 0.05);
  int bin1_first = 0;
  const int reps = 10000;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(1000 + static_cast<std::uint64_t>(rep));
    auto picked = sample_fewshot_n(profile, 0.05, 5, rng);
    // first drawn query: bin 1 queries are q1..q90
    const auto& first = picked[0];
    const int number = std::stoi(first.substr(1));
    if (number <= 90) ++bin1_first;
  }
  const double freq = static_cast<double>(bin1_first) / reps;
  CHECK(std::abs(freq - p[0]) < 0.01);
}

TEST_CASE("sample_fewshot: exhausted bins redirect to remaining bins") {
  // bin 2 has only 2 members but high probability mass is on bin 1;
  // request more than bin sizes to force redistribution
  auto profile = profile_from_counts({3, 2});
  Rng rng(5);
  auto picked = sample_fewshot_n(profile, 2.0, 5, rng);
  CHECK(picked.size() == 5);
  std::set<std::string> distinct(picked.begin(), picked.end());
  CHECK(distinct.size() == 5);
}

TEST_CASE("calibration weight: branches of the adaptive rule") {
  CHECK(calibration_weight(0.01, 0.05, 0.02, 0.5) == 0.0);  // within tolerance
  CHECK(calibration_weight(0.05, 0.05, 0.02, 0.5) == 0.0);  // boundary inclusive
  CHECK(calibration_weight(0.10, 0.05, 0.02, 0.5) ==
        doctest::Approx(0.04).epsilon(1e-9));  // (0.10/0.05) * 0.02
  CHECK(calibration_weight(1.0, 0.01, 1.0, 0.5) == 0.5);  // cap
  CHECK_THROWS_AS(calibration_weight(-0.1, 0.05, 0.02, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(calibration_weight(0.1, 0.0, 0.02, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(calibration_weight(0.1, 0.05, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(calibration_weight(0.1, 0.05, 0.02, 0.0), std::invalid_argument);
}

TEST_CASE("calibration weight: zero on [0, tau], then linear, then flat") {
  const double tau = 0.05, psi = 0.1, alpha_max = 0.5;
  // identically zero on [0, tau]
  for (int i = 0; i <= 20; ++i) {
    CHECK(calibration_weight(tau * i / 20.0, tau, psi, alpha_max) == 0.0);
  }
  // piecewise linear in between: slope psi/tau
  const double eps1 = 0.08, eps2 = 0.12;
  const double a1 = calibration_weight(eps1, tau, psi, alpha_max);
  const double a2 = calibration_weight(eps2, tau, psi, alpha_max);
  CHECK((a2 - a1) / (eps2 - eps1) == doctest::Approx(psi / tau).epsilon(1e-9));
  // constant at the cap
  CHECK(calibration_weight(0.4, tau, psi, alpha_max) == alpha_max);
  CHECK(calibration_weight(0.9, tau, psi, alpha_max) == alpha_max);
}

TEST_CASE("calibration weight: monotone in epsilon and psi") {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const double tau = 0.01 + rng.uniform() * 0.2;
    const double psi = 0.01 + rng.uniform() * 0.99;
    const double alpha_max = 0.05 + rng.uniform() * 0.95;
    const double e1 = rng.uniform();
    const double e2 = e1 + rng.uniform() * (1.0 - e1);
    CHECK(calibration_weight(e2, tau, psi, alpha_max) >=
          calibration_weight(e1, tau, psi, alpha_max));
    const double psi2 = psi + rng.uniform() * (1.0 - psi);
    CHECK(calibration_weight(e2, tau, psi2, alpha_max) >=
          calibration_weight(e2, tau, psi, alpha_max));
  }
}

TEST_CASE("calibrated score: endpoints, printed example, betweenness") {
  CHECK(calibrated_score(0.8, 0.3, 0.0) == 0.8);
  CHECK(calibrated_score(0.8, 0.3, 1.0) == 0.3);
  CHECK(calibrated_score(0.8, 0.6, 0.25) == doctest::Approx(0.75).epsilon(1e-12));

  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const double pred = rng.uniform(), few = rng.uniform(), alpha = rng.uniform();
    const double s = calibrated_score(pred, few, alpha);
    CHECK(s >= std::min(pred, few) - 1e-15);
    CHECK(s <= std::max(pred, few) + 1e-15);
  }
  CHECK_THROWS_AS(calibrated_score(1.2, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("surrogate_evaluate: agreement, disagreement, and fallback") {
  QuerySet dataset = testsupport::tiny_queryset(100);
  // profile over 100 queries from one warm-up row (not load-bearing here)
  std::vector<PerQueryScores> rows(1);
  for (const auto& q : dataset.items) rows[0].push_back({q.id, 0.5});
  DifficultyProfile profile = build_difficulty_profile(rows, 10);

  SamplerConfig sampler_cfg;
  sampler_cfg.rho = 0.02;  // budget 2 of 100 -> psi = 0.02
  CalibrationConfig calib_cfg;
  calib_cfg.tau = 0.05;
  calib_cfg.alpha_max = 0.5;

  // q1 answers correctly, everything else fails -> fixed subset {q1,q2} scores 0.5
  testsupport::FakeExecutor executor(
      [](const WorkflowSpec&, const QueryItem& q) { return q.id == "q1"; });
  WorkflowSpec w = make_initial_workflow("w001");
  w.round = 6;
  w.parent_id = "w005";
  opt::PredictContext ctx;
  std::vector<std::string> fixed{"q1", "q2"};

  SUBCASE("prediction equals few-shot: alpha 0, s_hat = prediction") {
    testsupport::StubOptimizer stub;
    stub.prediction = [](const WorkflowSpec&) { return 0.5; };
    Rng rng(1);
    auto result = surrogate_evaluate(w, profile, sampler_cfg, calib_cfg, dataset,
                                     exec::EvaluatorSpec{}, executor, stub, ctx, rng, 1, &fixed);
    CHECK(result.outcome.s_few == doctest::Approx(0.5));
    CHECK(result.outcome.alpha == 0.0);
    CHECK(result.outcome.s_hat == doctest::Approx(0.5));
    CHECK(result.outcome.psi == doctest::Approx(0.02));
    CHECK_FALSE(result.outcome.fallback);
  }

  SUBCASE("disagreeing prediction: the chained oracle value") {
    testsupport::StubOptimizer stub;
    stub.prediction = [](const WorkflowSpec&) { return 0.9; };
    Rng rng(1);
    auto result = surrogate_evaluate(w, profile, sampler_cfg, calib_cfg, dataset,
                                     exec::EvaluatorSpec{}, executor, stub, ctx, rng, 1, &fixed);
    // eps = 0.4, alpha = min((0.4/0.05)*0.02, 0.5) = 0.16
    CHECK(result.outcome.epsilon == doctest::Approx(0.4));
    CHECK(result.outcome.alpha == doctest::Approx(0.16).epsilon(1e-9));
    CHECK(result.outcome.s_hat == doctest::Approx(0.836).epsilon(1e-9));
    CHECK(result.predict_tokens.total() > 0);
    CHECK(result.exec_tokens.total() > 0);
  }

  SUBCASE("unparseable prediction: few-shot fallback with alpha 1") {
    testsupport::StubOptimizer stub;
    stub.predictions_ok = false;
    Rng rng(1);
    auto result = surrogate_evaluate(w, profile, sampler_cfg, calib_cfg, dataset,
                                     exec::EvaluatorSpec{}, executor, stub, ctx, rng, 1, &fixed);
    CHECK(result.prediction_fallback);
    CHECK(result.outcome.fallback);
    CHECK(result.outcome.alpha == 1.0);
    CHECK(result.outcome.s_hat == doctest::Approx(0.5));
  }

  SUBCASE("fresh sampling draws the configured budget") {
    testsupport::StubOptimizer stub;
    Rng rng(11);
    auto result = surrogate_evaluate(w, profile, sampler_cfg, calib_cfg, dataset,
                                     exec::EvaluatorSpec{}, executor, stub, ctx, rng, 1, nullptr);
    CHECK(result.subset.size() == 2);
    CHECK(result.outcome.psi == doctest::Approx(0.02));
  }
}
