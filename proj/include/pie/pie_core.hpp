#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pie/matrix.hpp"
#include "pie/standardize.hpp"
#include "pie/tabular_io.hpp"

namespace pie {

// Per-row normalized contributions. For an active row i,
//   weights(i, k) = p_ik / row_sums[i],  p_ik = max(0, beta_k * x_ik),
// so the row sums to one. Inactive rows (no positive product) are all zero.
struct InfluenceMatrix {
  Matrix weights;
  std::vector<double> row_sums;
  std::vector<bool> active;

  std::size_t n_rows() const { return weights.rows(); }
  std::size_t n_cols() const { return weights.cols(); }
};

struct Driver {
  std::size_t index = 0;
  std::string feature;
  double weight = 0.0;

  friend bool operator==(const Driver&, const Driver&) = default;
};

struct RowAttribution {
  std::size_t row = 0;
  std::string row_id;
  bool degenerate = false;
  std::optional<Driver> top_driver;
  std::vector<Driver> ranked;  // weight descending, ties by column index

  friend bool operator==(const RowAttribution&, const RowAttribution&) = default;
};

struct PieReport {
  std::vector<RowAttribution> rows;
};

// Normalizes a matrix of products. Negative products count as zero.
InfluenceMatrix normalize_products(const Matrix& products);

// `beta_std` and `x_std` are clipped standardized inputs (all >= 0).
InfluenceMatrix influence_matrix(const std::vector<double>& beta_std,
                                 const Matrix& x_std);

// Top driver per row: smallest k attaining max_k W_ik.
PieReport pie_argmax(const InfluenceMatrix& w,
                     const std::vector<std::string>& names);

// Up to k strictly positive weights per row.
PieReport top_k_drivers(const InfluenceMatrix& w,
                        const std::vector<std::string>& names, std::size_t k);

struct StandardizedPie {
  PieReport report;
  InfluenceMatrix influence;
  StandardizationStats stats;
  FeatureImportance importance_std;  // clipped standardized importance
};

// Full pipeline: standardize and clip both inputs, normalize products, rank.
// `imp` is aligned to the table's column order first.
StandardizedPie pie_standardized(const FeatureImportance& imp,
                                 const ObservationTable& table, std::size_t k);

struct RawPie {
  PieReport report;
  InfluenceMatrix influence;
};

// Products on unstandardized values, negative products clipped to zero.
RawPie pie_raw(const FeatureImportance& imp, const ObservationTable& table,
               std::size_t k);

}  // namespace pie
