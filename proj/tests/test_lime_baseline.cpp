#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pie/errors.hpp"
#include "pie/lime_baseline.hpp"
#include "test_util.hpp"

namespace pie {
namespace {

using testing::make_importance;
using testing::make_table;

StandardizationStats stats_for(const oracle::Rows& rows) {
  return standardize_columns(make_table(rows)).stats;
}

TEST(ExplainInstance, RecoversSingleLinearDriver) {
  std::mt19937_64 rng(41);
  const auto rows = oracle::random_rows(rng, 30, 3);
  const auto stats = stats_for(rows);
  const LinearModel model({3.0, 0.0, 0.0});
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ExplainParams p;
    p.k_features = 1;
    p.seed = seed;
    const auto e = explain_instance(model, rows[seed % rows.size()], stats, p);
    ASSERT_EQ(e.selected_indices.size(), 1u);
    if (e.selected_indices[0] == 0 && e.weights[0] > 0) ++hits;
  }
  EXPECT_EQ(hits, 100);
}

TEST(ExplainInstance, FullWidthRecoversLinearWeightsInZUnits) {
  std::mt19937_64 rng(42);
  const auto rows = oracle::random_rows(rng, 25, 4, -3, 8);
  const auto stats = stats_for(rows);
  const std::vector<double> w{1.5, -2.0, 0.25, 0.0};
  const LinearModel model(w, 3.0);
  ExplainParams p;
  p.k_features = 4;
  const auto e = explain_instance(model, rows[3], stats, p);
  ASSERT_EQ(e.selected_indices, (std::vector<std::size_t>{0, 1, 2, 3}));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(e.weights[k], w[k] * stats.col_stds[k], 1e-6);
  }
  EXPECT_EQ(e.samples_used, 500u);
  EXPECT_DOUBLE_EQ(e.kernel_width, 1.5);
}

TEST(ExplainInstance, Preconditions) {
  const auto stats = stats_for({{0, 0, 0}, {1, 2, 3}});
  const LinearModel model({1, 1, 1});
  const std::vector<double> x{0.5, 1, 1.5};
  ExplainParams p;
  p.k_features = 3;
  p.n_samples = 3;
  EXPECT_THROW(explain_instance(model, x, stats, p), InputError);
  p.n_samples = 4;
  EXPECT_NO_THROW(explain_instance(model, x, stats, p));
  p.kernel_width = 0.0;
  EXPECT_THROW(explain_instance(model, x, stats, p), InputError);
  p.kernel_width = 1.0;
  p.k_features = 0;
  EXPECT_THROW(explain_instance(model, x, stats, p), InputError);
  p.k_features = 1;
  EXPECT_THROW(explain_instance(model, std::vector<double>{1, 2}, stats, p), InputError);
}

TEST(ExplainInstance, VanishingKernelIsDegenerate) {
  const auto stats = stats_for({{0, 0}, {1, 2}, {2, 1}});
  ExplainParams p;
  p.kernel_width = 1e-6;
  EXPECT_THROW(explain_instance(LinearModel({1, 1}), std::vector<double>{1, 1}, stats, p),
               DegenerateError);
}

TEST(ExplainInstance, ConstantFeatureEntersLastWithZeroWeight) {
  const auto stats = stats_for({{1, 5, 0}, {2, 5, 1}, {4, 5, 3}});
  ExplainParams p;
  p.k_features = 2;
  const auto e = explain_instance(LinearModel({0, 9, 0}), std::vector<double>{2, 5, 1}, stats, p);
  ASSERT_EQ(e.selected_indices.size(), 2u);
  EXPECT_EQ(std::count(e.selected_indices.begin(), e.selected_indices.end(), 1u), 0);
  p.k_features = 3;
  const auto full = explain_instance(LinearModel({0, 9, 0}), std::vector<double>{2, 5, 1}, stats, p);
  EXPECT_EQ(full.weights[1], 0.0);
}

TEST(FitSparseLinear, FullWidthEqualsWeightedLeastSquares) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30 + rng() % 40, m = 1 + rng() % 5;
    const auto x = oracle::random_rows(rng, n, m);
    std::vector<double> y, w;
    for (const auto& r : x) {
      y.push_back(std::sin(r[0]) + r.back() * r.back());
      w.push_back(u(rng));
    }
    std::vector<std::size_t> all(m);
    for (std::size_t k = 0; k < m; ++k) all[k] = k;
    const auto fit = fit_sparse_linear(make_table(x).values, y, w, m + 2);
    const auto ref = oracle::wls(x, y, w, all);
    EXPECT_EQ(fit.selected, all);
    EXPECT_NEAR(fit.intercept, ref.coef[0], 1e-9);
    for (std::size_t k = 0; k < m; ++k) EXPECT_NEAR(fit.weights[k], ref.coef[k + 1], 1e-9);
  }
}

TEST(FitSparseLinear, ForwardSelectionMatchesBruteForceStepwise) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 40, m = 3 + rng() % 4, k = 1 + rng() % (m - 1);
    const auto x = oracle::random_rows(rng, n, m);
    std::vector<double> y, w;
    for (const auto& r : x) {
      double v = 0;
      for (std::size_t j = 0; j < m; ++j) v += (j % 2 ? 1.0 : -0.5) * (j + 1) * r[j];
      y.push_back(v + u(rng));
      w.push_back(u(rng));
    }
    const auto fit = fit_sparse_linear(make_table(x).values, y, w, k);
    const auto chosen = oracle::forward_select(x, y, w, k);
    EXPECT_EQ(fit.selected, chosen);
    const auto ref = oracle::wls(x, y, w, chosen);
    for (std::size_t a = 0; a < k; ++a) EXPECT_NEAR(fit.weights[a], ref.coef[a + 1], 1e-9);
  }
}

TEST(ExplanationMatrix, ScattersAndIsDeterministic) {
  std::mt19937_64 rng(45);
  const auto rows = oracle::random_rows(rng, 8, 5);
  const auto table = make_table(rows);
  const auto stats = stats_for(rows);
  const LinearModel model({2, 0, -1, 0.5, 0});
  ExplainParams p;
  p.k_features = 2;
  p.n_samples = 200;
  p.seed = 9;
  const auto a = explanation_matrix(model, table, stats, p);
  const auto b = explanation_matrix(model, table, stats, p);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.explanations, b.explanations);

  for (std::size_t i = 0; i < rows.size(); ++i) {
    ExplainParams row_p = p;
    row_p.seed = p.seed + i;
    const auto e = explain_instance(model, rows[i], stats, row_p, i);
    EXPECT_EQ(e, a.explanations[i]);
    for (std::size_t j = 0; j < 5; ++j) {
      const auto it = std::find(e.selected_indices.begin(), e.selected_indices.end(), j);
      if (it == e.selected_indices.end()) {
        EXPECT_EQ(a.weights(i, j), 0.0);
      } else {
        EXPECT_EQ(a.weights(i, j), e.weights[static_cast<std::size_t>(it - e.selected_indices.begin())]);
      }
    }
  }

  const auto imp = global_feature_importance(a.weights);
  for (std::size_t j = 0; j < 5; ++j) {
    bool ever = false;
    for (const auto& e : a.explanations)
      ever = ever || std::find(e.selected_indices.begin(), e.selected_indices.end(), j) !=
                         e.selected_indices.end();
    EXPECT_EQ(imp[j] == 0.0, !ever) << j;
  }

  p.seed = 10;
  EXPECT_NE(explanation_matrix(model, table, stats, p).weights, a.weights);
}

TEST(ExplanationMatrix, SingleRowTable) {
  const auto stats = stats_for({{0, 1}, {2, 5}});
  const auto table = make_table({{1, 2}});
  const LinearModel model({1, -1});
  ExplainParams p;
  p.k_features = 1;
  const auto m = explanation_matrix(model, table, stats, p);
  const auto e = explain_instance(model, table.values.row(0), stats, p);
  ASSERT_EQ(m.explanations.size(), 1u);
  EXPECT_EQ(m.explanations[0], e);
}

TEST(NearestRowModel, LooksUpClosestRow) {
  const auto rows = oracle::Rows{{0, 0}, {10, 0}, {0, 10}};
  const NearestRowModel model(make_table(rows).values, {1.0, 2.0, 3.0}, stats_for(rows));
  EXPECT_EQ(model.evaluate(std::vector<double>{9, 1}), 2.0);
  EXPECT_EQ(model.evaluate(std::vector<double>{1, 8}), 3.0);
  EXPECT_EQ(model.evaluate(std::vector<double>{4, 0}), 1.0);
}

TEST(SubmodularPick, EmptyBudget) {
  const auto r = submodular_pick(Matrix(3, 2, 1.0), 0);
  EXPECT_TRUE(r.selected_rows.empty());
  EXPECT_EQ(r.coverage_score, 0.0);
}

TEST(SubmodularPick, DominantRowFirst) {
  const Matrix w(4, 3, {0, 0.2, 0,  1, 1, 1,  0.5, 0, 0,  0, 0, 3});
  const auto r = submodular_pick(w, 2);
  ASSERT_EQ(r.selected_rows.size(), 1u);  // nothing left to cover after row 1
  EXPECT_EQ(r.selected_rows[0], 1u);
  EXPECT_NEAR(r.coverage_score, std::sqrt(1.5) + std::sqrt(1.2) + std::sqrt(4.0), 1e-12);
}

TEST(SubmodularPick, GreedyAgainstExhaustiveAndMonotone) {
  std::mt19937_64 rng(46);
  std::normal_distribution<double> g(0.0, 1.0);
  int optimal = 0;
  const int instances = 200;
  for (int trial = 0; trial < instances; ++trial) {
    const std::size_t n = 2 + rng() % 9, m = 2 + rng() % 7;
    oracle::Rows w(n, std::vector<double>(m, 0.0));
    for (auto& row : w) {
      const std::size_t k = 1 + rng() % std::min<std::size_t>(3, m);
      for (std::size_t a = 0; a < k; ++a) row[rng() % m] = g(rng);
    }
    const Matrix mw = make_table(w).values;
    double prev = 0.0;
    for (std::size_t b = 0; b <= 3; ++b) {
      const auto r = submodular_pick(mw, b);
      EXPECT_LE(r.selected_rows.size(), b);
      EXPECT_GE(r.coverage_score, prev - 1e-12);
      prev = r.coverage_score;
      const double best = oracle::best_coverage(w, b);
      EXPECT_GE(r.coverage_score, (1.0 - 1.0 / std::exp(1.0)) * best - 1e-12);
      if (b == 3 && r.coverage_score >= best - 1e-12) ++optimal;
    }
  }
  EXPECT_GE(optimal, instances * 9 / 10);
}

TEST(CompareWithPie, PerfectAndNoAgreement) {
  InfluenceMatrix infl{Matrix(2, 3, {1, 0, 0, 0, 1, 0}), {1, 1}, {true, true}};
  const auto report = top_k_drivers(infl, {"a", "b", "c"}, 1);

  ExplanationMatrix same{{"a", "b", "c"}, Matrix(2, 3, {2, 0, 0, 0, -3, 0}), {}};
  same.explanations.push_back({.instance = 0, .selected_indices = {0}});
  same.explanations.push_back({.instance = 1, .selected_indices = {1}});
  const auto s = compare_with_pie(report, same);
  EXPECT_EQ(s.active_rows, 2u);
  EXPECT_EQ(s.fraction_in_selected, 1.0);
  EXPECT_EQ(s.fraction_matches_largest, 1.0);

  ExplanationMatrix other{{"a", "b", "c"}, Matrix(2, 3, {0, 0, 5, 0, 0, 5}), {}};
  other.explanations.push_back({.instance = 0, .selected_indices = {2}});
  other.explanations.push_back({.instance = 1, .selected_indices = {2}});
  const auto d = compare_with_pie(report, other);
  EXPECT_EQ(d.fraction_in_selected, 0.0);
  EXPECT_EQ(d.fraction_matches_largest, 0.0);

  ExplanationMatrix short_expl{{"a", "b", "c"}, Matrix(1, 3), {LocalExplanation{}}};
  EXPECT_THROW(compare_with_pie(report, short_expl), InputError);
}

// Each row has one planted above-average feature among the two that carry
// positive standardized importance. A linear black box explains every row
// with the same weights, so agreement is predictable from the plant alone.
TEST(CompareWithPie, PlantedDrivers) {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::vector<double> beta{4, 3, 1, 0};
  const std::size_t n = 60;
  oracle::Rows x(n, std::vector<double>(4));
  std::vector<std::size_t> planted(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x[i]) v = g(rng);
    planted[i] = rng() % 3 == 0 ? 0 : 1;
    x[i][planted[i]] = 4.0 + 0.1 * g(rng);
    x[i][1 - planted[i]] = -2.0 + 0.1 * g(rng);
  }
  const auto table = make_table(x);
  const auto pie = pie_standardized(make_importance(beta), table, 4);
  const auto stats = standardize_columns(table).stats;
  ExplainParams p;
  p.k_features = 2;
  const auto expl = explanation_matrix(LinearModel(beta), table, stats, p);
  const auto summary = compare_with_pie(pie.report, expl);

  // Oracle: the local weights are beta_k * sd_k everywhere.
  std::vector<double> scaled(4);
  std::vector<std::size_t> order{0, 1, 2, 3};
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<double> col;
    for (const auto& r : x) col.push_back(r[k]);
    scaled[k] = beta[k] * oracle::sample_std(col);
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scaled[a] > scaled[b]; });
  double expect_top = 0, expect_in = 0;
  for (std::size_t i = 0; i < n; ++i) {
    expect_top += planted[i] == order[0];
    expect_in += planted[i] == order[0] || planted[i] == order[1];
  }
  EXPECT_EQ(summary.active_rows, n);
  EXPECT_NEAR(summary.fraction_matches_largest, expect_top / n, 0.1);
  EXPECT_NEAR(summary.fraction_in_selected, expect_in / n, 0.1);
}

}  // namespace
}  // namespace pie
