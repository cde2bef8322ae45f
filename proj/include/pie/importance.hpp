#pragma once

#include <string>
#include <vector>

#include "pie/tabular_io.hpp"

namespace pie {

// Features plus the dependent variable Y. Binary targets are plain 0/1.
struct LabeledTable {
  ObservationTable features;
  std::vector<double> target;
};

// Moves the named column out of `table` into the target. InputError when the
// column is absent or it is the only column.
LabeledTable split_target(const ObservationTable& table,
                          const std::string& target_column);

// Largest eigenvalue ratio of the design's normal matrix that is accepted.
inline constexpr double kMaxConditionNumber = 1e8;

// Least-squares fit of Y on z-scored features plus an intercept; returns the
// feature coefficients (intercept dropped). These are standardized betas:
// beta_k = (raw coefficient) * sd(x_k).
//
// Throws DegenerateError for n <= m, a constant target, constant or
// collinear columns (named in the message), or a condition number above
// kMaxConditionNumber.
FeatureImportance ols_importance(const LabeledTable& data);

// |Pearson correlation(x_k, Y)| per feature, in [0, 1].
FeatureImportance correlation_importance(const LabeledTable& data);

}  // namespace pie
