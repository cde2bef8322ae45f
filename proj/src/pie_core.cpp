#include "pie/pie_core.hpp"

#include <algorithm>
#include <cmath>

#include "pie/errors.hpp"

namespace pie {
namespace {

void check_names(const InfluenceMatrix& w, const std::vector<std::string>& names) {
  if (names.size() != w.n_cols()) {
    throw InputError("feature name count does not match influence matrix width");
  }
  if (w.row_sums.size() != w.n_rows() || w.active.size() != w.n_rows()) {
    throw InputError("influence matrix row metadata has the wrong length");
  }
}

void attach_row_ids(PieReport& report, const ObservationTable& table) {
  for (auto& row : report.rows) row.row_id = table.row_label(row.row);
}

}  // namespace

InfluenceMatrix normalize_products(const Matrix& products) {
  const std::size_t n = products.rows();
  const std::size_t m = products.cols();
  InfluenceMatrix out{Matrix(n, m), std::vector<double>(n, 0.0),
                      std::vector<bool>(n, false)};
  std::vector<double> clipped(m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = products.row(i);
    for (std::size_t k = 0; k < m; ++k) clipped[k] = std::max(0.0, p[k]);
    const double s = ordered_sum(clipped);
    if (!std::isfinite(s)) {
      throw InputError("row " + std::to_string(i + 1) + ": products overflow");
    }
    if (!(s > 0.0)) continue;
    out.row_sums[i] = s;
    out.active[i] = true;
    auto w = out.weights.row(i);
    for (std::size_t k = 0; k < m; ++k) w[k] = clipped[k] / s;
  }
  return out;
}

InfluenceMatrix influence_matrix(const std::vector<double>& beta_std,
                                 const Matrix& x_std) {
  if (beta_std.size() != x_std.cols()) {
    throw InputError("importance length " + std::to_string(beta_std.size()) +
                     " does not match table width " +
                     std::to_string(x_std.cols()));
  }
  const auto negative = [](double v) { return v < 0.0; };
  if (std::any_of(beta_std.begin(), beta_std.end(), negative) ||
      std::any_of(x_std.data().begin(), x_std.data().end(), negative)) {
    throw InputError("influence_matrix expects clipped (non-negative) inputs");
  }
  Matrix products(x_std.rows(), x_std.cols());
  for (std::size_t i = 0; i < x_std.rows(); ++i) {
    for (std::size_t k = 0; k < x_std.cols(); ++k) {
      products(i, k) = beta_std[k] * x_std(i, k);
    }
  }
  return normalize_products(products);
}

PieReport pie_argmax(const InfluenceMatrix& w,
                     const std::vector<std::string>& names) {
  check_names(w, names);
  PieReport report;
  report.rows.reserve(w.n_rows());
  for (std::size_t i = 0; i < w.n_rows(); ++i) {
    RowAttribution row;
    row.row = i;
    row.row_id = std::to_string(i + 1);
    if (!w.active[i]) {
      row.degenerate = true;
      report.rows.push_back(std::move(row));
      continue;
    }
    const auto weights = w.weights.row(i);
    // max_element returns the first maximum, i.e. the smallest index.
    const auto best = static_cast<std::size_t>(
        std::max_element(weights.begin(), weights.end()) - weights.begin());
    Driver top{best, names[best], weights[best]};
    row.top_driver = top;
    row.ranked.push_back(std::move(top));
    report.rows.push_back(std::move(row));
  }
  return report;
}

PieReport top_k_drivers(const InfluenceMatrix& w,
                        const std::vector<std::string>& names, std::size_t k) {
  if (k == 0) throw InputError("top-k must be at least 1");
  check_names(w, names);
  PieReport report;
  report.rows.reserve(w.n_rows());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < w.n_rows(); ++i) {
    RowAttribution row;
    row.row = i;
    row.row_id = std::to_string(i + 1);
    if (!w.active[i]) {
      row.degenerate = true;
      report.rows.push_back(std::move(row));
      continue;
    }
    const auto weights = w.weights.row(i);
    order.clear();
    for (std::size_t j = 0; j < weights.size(); ++j) {
      if (weights[j] > 0.0) order.push_back(j);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return weights[a] > weights[b];
    });
    if (order.size() > k) order.resize(k);
    for (std::size_t j : order) row.ranked.push_back({j, names[j], weights[j]});
    row.top_driver = row.ranked.front();
    report.rows.push_back(std::move(row));
  }
  return report;
}

StandardizedPie pie_standardized(const FeatureImportance& imp,
                                 const ObservationTable& table, std::size_t k) {
  if (k == 0) throw InputError("top-k must be at least 1");
  const auto aligned = align(imp, table);
  auto beta = standardize_importance(aligned);
  auto fitted = standardize_columns(table);

  StandardizedPie out;
  out.influence = influence_matrix(beta.clipped.beta, fitted.clipped.values);
  out.report = top_k_drivers(out.influence, table.column_names, k);
  attach_row_ids(out.report, table);
  out.stats = std::move(fitted.stats);
  out.stats.beta_mean = beta.beta_mean;
  out.stats.beta_std = beta.beta_std;
  out.importance_std = std::move(beta.clipped);
  return out;
}

RawPie pie_raw(const FeatureImportance& imp, const ObservationTable& table,
               std::size_t k) {
  if (k == 0) throw InputError("top-k must be at least 1");
  validate(table);
  const auto aligned = align(imp, table);
  validate(aligned);

  Matrix products(table.n_rows(), table.n_cols());
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
      products(i, j) = aligned.beta[j] * table.values(i, j);
    }
  }
  RawPie out;
  out.influence = normalize_products(products);
  out.report = top_k_drivers(out.influence, table.column_names, k);
  attach_row_ids(out.report, table);
  return out;
}

}  // namespace pie
