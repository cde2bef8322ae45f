#include "pie/standardize.hpp"

#include <algorithm>
#include <cmath>

#include "pie/errors.hpp"

namespace pie {

double ordered_sum(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

double mean(std::span<const double> values) {
  return ordered_sum(values) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values, double center) {
  double ss = 0.0;
  for (double v : values) {
    const double d = v - center;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double z_score(double value, double col_mean, double col_std) {
  if (col_std == 0.0) return 0.0;
  return (value - col_mean) / col_std;
}

StandardizedImportance standardize_importance(const FeatureImportance& imp) {
  validate(imp);
  if (imp.size() < 2) {
    throw InputError("standardizing importance needs at least 2 features");
  }
  const auto& beta = imp.beta;
  if (std::all_of(beta.begin(), beta.end(),
                  [&](double b) { return b == beta.front(); })) {
    throw DegenerateError(
        "all feature importances are equal; no feature ranking is derivable");
  }

  StandardizedImportance out;
  out.beta_mean = mean(beta);
  out.beta_std = sample_std(beta, out.beta_mean);
  out.clipped.column_names = imp.column_names;
  out.clipped.beta.resize(beta.size());
  for (std::size_t k = 0; k < beta.size(); ++k) {
    out.clipped.beta[k] =
        std::max(0.0, (beta[k] - out.beta_mean) / out.beta_std);
  }
  return out;
}

StandardizedTable standardize_columns(const ObservationTable& table) {
  validate(table);
  if (table.n_rows() < 2) {
    throw InputError("fitting column statistics needs at least 2 rows");
  }
  const std::size_t m = table.n_cols();

  StandardizationStats stats;
  stats.column_names = table.column_names;
  stats.col_means.resize(m);
  stats.col_stds.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto col = table.values.column(k);
    stats.col_means[k] = mean(col);
    const bool constant = std::all_of(
        col.begin(), col.end(), [&](double v) { return v == col.front(); });
    // Identical values can still leave a rounding residue in the mean.
    stats.col_stds[k] = constant ? 0.0 : sample_std(col, stats.col_means[k]);
    if (stats.col_stds[k] == 0.0) stats.constant_columns.push_back(k);
  }

  StandardizedTable out;
  out.clipped = apply_stats(table, stats);
  out.stats = std::move(stats);
  return out;
}

ObservationTable apply_stats(const ObservationTable& table,
                             const StandardizationStats& stats) {
  validate(table);
  if (table.column_names != stats.column_names ||
      stats.col_means.size() != table.n_cols() ||
      stats.col_stds.size() != table.n_cols()) {
    throw InputError("table columns do not match the fitted statistics");
  }
  ObservationTable out = table;
  for (std::size_t i = 0; i < out.n_rows(); ++i) {
    auto row = out.values.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] = std::max(0.0, z_score(row[k], stats.col_means[k], stats.col_stds[k]));
    }
  }
  return out;
}

void from_json(const nlohmann::json& j, StandardizationStats& stats) {
  try {
    j.at("column_names").get_to(stats.column_names);
    j.at("col_means").get_to(stats.col_means);
    j.at("col_stds").get_to(stats.col_stds);
    j.at("constant_columns").get_to(stats.constant_columns);
    stats.beta_mean.reset();
    stats.beta_std.reset();
    if (j.contains("beta_mean") && !j["beta_mean"].is_null()) {
      stats.beta_mean = j["beta_mean"].get<double>();
    }
    if (j.contains("beta_std") && !j["beta_std"].is_null()) {
      stats.beta_std = j["beta_std"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed standardization stats: ") + e.what());
  }
  const std::size_t m = stats.column_names.size();
  if (stats.col_means.size() != m || stats.col_stds.size() != m) {
    throw InputError("standardization stats have inconsistent lengths");
  }
  std::vector<std::size_t> expected;
  for (std::size_t k = 0; k < m; ++k) {
    if (stats.col_stds[k] < 0.0) throw InputError("negative standard deviation in stats");
    if (stats.col_stds[k] == 0.0) expected.push_back(k);
  }
  if (expected != stats.constant_columns) {
    throw InputError("constant_columns does not match zero standard deviations");
  }
}

}  // namespace pie
