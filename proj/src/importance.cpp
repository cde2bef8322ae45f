#include "pie/importance.hpp"

#include <algorithm>
#include <cmath>

#include "linalg.hpp"
#include "pie/errors.hpp"
#include "pie/standardize.hpp"

namespace pie {
namespace {

bool is_constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

std::string quoted_list(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& name : names) {
    if (!out.empty()) out += ", ";
    out += '"' + name + '"';
  }
  return out;
}

void check_labeled(const LabeledTable& data) {
  validate(data.features);
  if (data.target.size() != data.features.n_rows()) {
    throw InputError("target length does not match the number of rows");
  }
  for (double y : data.target) {
    if (!std::isfinite(y)) throw InputError("target contains a non-finite value");
  }
  if (data.features.n_rows() < 2 || is_constant(data.target)) {
    throw DegenerateError("target is constant; no importance can be estimated");
  }
}

void reject_constant_columns(const ObservationTable& features) {
  std::vector<std::string> constant;
  for (std::size_t k = 0; k < features.n_cols(); ++k) {
    if (is_constant(features.values.column(k))) {
      constant.push_back(features.column_names[k]);
    }
  }
  if (!constant.empty()) {
    throw DegenerateError("constant feature column(s): " + quoted_list(constant));
  }
}

}  // namespace

LabeledTable split_target(const ObservationTable& table,
                          const std::string& target_column) {
  const auto it = std::find(table.column_names.begin(), table.column_names.end(),
                            target_column);
  if (it == table.column_names.end()) {
    throw InputError("target column \"" + target_column + "\" not found");
  }
  if (table.n_cols() < 2) {
    throw InputError("table has no feature columns besides the target");
  }
  const auto t = static_cast<std::size_t>(it - table.column_names.begin());
  LabeledTable out;
  out.target = table.values.column(t);
  out.features.row_ids = table.row_ids;
  for (std::size_t k = 0; k < table.n_cols(); ++k) {
    if (k != t) out.features.column_names.push_back(table.column_names[k]);
  }
  std::vector<double> values;
  values.reserve(table.n_rows() * (table.n_cols() - 1));
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    for (std::size_t k = 0; k < table.n_cols(); ++k) {
      if (k != t) values.push_back(table.values(i, k));
    }
  }
  out.features.values =
      Matrix(table.n_rows(), table.n_cols() - 1, std::move(values));
  return out;
}

FeatureImportance ols_importance(const LabeledTable& data) {
  check_labeled(data);
  const auto& x = data.features;
  const std::size_t n = x.n_rows();
  const std::size_t m = x.n_cols();
  if (n <= m) {
    throw DegenerateError("OLS needs more rows than features (n=" +
                          std::to_string(n) + ", m=" + std::to_string(m) + ")");
  }
  reject_constant_columns(x);

  const auto fitted = standardize_columns(x);
  const std::size_t p = m + 1;  // intercept first
  auto design = [&](std::size_t i, std::size_t j) {
    return j == 0 ? 1.0
                  : z_score(x.values(i, j - 1), fitted.stats.col_means[j - 1],
                            fitted.stats.col_stds[j - 1]);
  };

  Matrix xtx(p, p);
  std::vector<double> xty(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      const double da = design(i, a);
      xty[a] += da * data.target[i];
      for (std::size_t b = a; b < p; ++b) xtx(a, b) += da * design(i, b);
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < a; ++b) xtx(a, b) = xtx(b, a);

  const auto eig = linalg::symmetric_eigen(xtx);
  const double smallest = eig.values.front();
  const double largest = eig.values.back();
  if (!(smallest > 0.0) || largest / smallest > kMaxConditionNumber) {
    std::vector<std::string> involved;
    for (std::size_t j = 1; j < p; ++j) {
      if (std::abs(eig.vectors(j, 0)) > 0.1) involved.push_back(x.column_names[j - 1]);
    }
    throw DegenerateError("design is rank-deficient or ill-conditioned; collinear columns: " +
                          quoted_list(involved));
  }
  const auto coef = linalg::cholesky_solve(xtx, xty);
  if (!coef) throw DegenerateError("normal equations are not positive definite");

  FeatureImportance out;
  out.column_names = x.column_names;
  out.beta.assign(coef->begin() + 1, coef->end());
  return out;
}

FeatureImportance correlation_importance(const LabeledTable& data) {
  check_labeled(data);
  reject_constant_columns(data.features);
  const auto& x = data.features;
  const double y_mean = mean(data.target);

  FeatureImportance out;
  out.column_names = x.column_names;
  out.beta.reserve(x.n_cols());
  for (std::size_t k = 0; k < x.n_cols(); ++k) {
    const auto col = x.values.column(k);
    const double x_mean = mean(col);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      const double dx = col[i] - x_mean;
      const double dy = data.target[i] - y_mean;
      sxy += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
    out.beta.push_back(std::min(1.0, std::abs(sxy) / std::sqrt(sxx * syy)));
  }
  return out;
}

}  // namespace pie
