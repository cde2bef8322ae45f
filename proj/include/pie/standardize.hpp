#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pie/tabular_io.hpp"

namespace pie {

// Fitted z-scoring parameters. Standard deviations use the n-1 divisor.
struct StandardizationStats {
  std::vector<std::string> column_names;
  std::vector<double> col_means;
  std::vector<double> col_stds;
  // Unset until an importance vector has been standardized alongside.
  std::optional<double> beta_mean;
  std::optional<double> beta_std;
  // Indices k with col_stds[k] == 0, ascending.
  std::vector<std::size_t> constant_columns;

  friend bool operator==(const StandardizationStats&,
                         const StandardizationStats&) = default;
};

struct StandardizedImportance {
  FeatureImportance clipped;  // max(0, (beta - mean) / std)
  double beta_mean = 0.0;
  double beta_std = 0.0;
};

struct StandardizedTable {
  ObservationTable clipped;  // max(0, (x - mean) / std); constant columns 0
  StandardizationStats stats;
};

// Left-to-right sum; every reduction in this library goes through it so
// results do not depend on evaluation order.
double ordered_sum(std::span<const double> values);
double mean(std::span<const double> values);
// Two-pass sample standard deviation around `center`.
double sample_std(std::span<const double> values, double center);

// Throws InputError when m < 2, DegenerateError when all betas are equal.
StandardizedImportance standardize_importance(const FeatureImportance& imp);

// Fits per-column stats (n >= 2) and returns the clipped z-scores.
StandardizedTable standardize_columns(const ObservationTable& table);

// Clipped z-scores of `table` under frozen stats. Accepts any n >= 1.
ObservationTable apply_stats(const ObservationTable& table,
                             const StandardizationStats& stats);

// Unclipped z-score of a single value; 0 for constant columns.
double z_score(double value, double col_mean, double col_std);

// JSON keys: column_names, col_means, col_stds, beta_mean, beta_std,
// constant_columns. Unset beta fields are written as null.
template <typename BasicJson>
void to_json(BasicJson& j, const StandardizationStats& stats) {
  j = BasicJson::object();
  j["column_names"] = stats.column_names;
  j["col_means"] = stats.col_means;
  j["col_stds"] = stats.col_stds;
  j["beta_mean"] = nullptr;
  j["beta_std"] = nullptr;
  if (stats.beta_mean) j["beta_mean"] = *stats.beta_mean;
  if (stats.beta_std) j["beta_std"] = *stats.beta_std;
  j["constant_columns"] = stats.constant_columns;
}

// Throws InputError on missing keys or violated invariants.
void from_json(const nlohmann::json& j, StandardizationStats& stats);

}  // namespace pie
