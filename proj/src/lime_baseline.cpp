#include "pie/lime_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "linalg.hpp"
#include "pie/errors.hpp"

namespace pie {
namespace {

// Box-Muller over mt19937_64 raw output. std::normal_distribution is not
// specified bit-for-bit, so samples would differ between standard libraries.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    return r * std::cos(t);
  }

 private:
  // Open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

void check_stats(const StandardizationStats& stats, std::size_t m) {
  if (stats.col_means.size() != m || stats.col_stds.size() != m) {
    throw InputError("standardization stats do not match the model width");
  }
}

// Weighted, centered design for one local neighbourhood.
struct LocalDesign {
  Matrix gram;                 // sum_s pi_s c_sa c_sb
  std::vector<double> cross;   // sum_s pi_s c_sa r_s
  std::vector<double> col_mean;
  double y_mean = 0.0;
  double total_weight = 0.0;
};

// Quadratic form g_S' G_SS^-1 g_S: the weighted RSS drop from fitting S.
std::optional<double> explained(const LocalDesign& d,
                                const std::vector<std::size_t>& subset) {
  const std::size_t p = subset.size();
  Matrix g(p, p);
  std::vector<double> rhs(p);
  for (std::size_t a = 0; a < p; ++a) {
    rhs[a] = d.cross[subset[a]];
    for (std::size_t b = 0; b < p; ++b) g(a, b) = d.gram(subset[a], subset[b]);
  }
  const auto coef = linalg::cholesky_solve(g, rhs);
  if (!coef) return std::nullopt;
  double q = 0.0;
  for (std::size_t a = 0; a < p; ++a) q += rhs[a] * (*coef)[a];
  return q;
}

}  // namespace

double LinearModel::evaluate(std::span<const double> x) const {
  double y = intercept_;
  for (std::size_t k = 0; k < weights_.size(); ++k) y += weights_[k] * x[k];
  return y;
}

NearestRowModel::NearestRowModel(Matrix rows, std::vector<double> scores,
                                 StandardizationStats stats)
    : rows_(std::move(rows)), scores_(std::move(scores)), stats_(std::move(stats)) {
  if (rows_.rows() == 0 || scores_.size() != rows_.rows()) {
    throw InputError("lookup model needs one score per stored row");
  }
  check_stats(stats_, rows_.cols());
}

double NearestRowModel::evaluate(std::span<const double> x) const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_row = 0;
  for (std::size_t i = 0; i < rows_.rows(); ++i) {
    double d = 0.0;
    for (std::size_t k = 0; k < rows_.cols(); ++k) {
      const double diff = z_score(x[k], stats_.col_means[k], stats_.col_stds[k]) -
                          z_score(rows_(i, k), stats_.col_means[k], stats_.col_stds[k]);
      d += diff * diff;
    }
    if (d < best) {
      best = d;
      best_row = i;
    }
  }
  return scores_[best_row];
}

double default_kernel_width(std::size_t n_features) {
  return 0.75 * std::sqrt(static_cast<double>(n_features));
}

LocalExplanation explain_instance(const BlackBoxModel& model,
                                  std::span<const double> x,
                                  const StandardizationStats& stats,
                                  const ExplainParams& params,
                                  std::size_t instance) {
  const std::size_t m = model.n_features();
  if (x.size() != m) throw InputError("instance width does not match the model");
  check_stats(stats, m);
  const std::size_t n = params.n_samples;
  const std::size_t k = params.k_features;
  if (k == 0) throw InputError("explanation length K must be at least 1");
  if (n < k + 1) {
    throw InputError("need at least K + 1 = " + std::to_string(k + 1) +
                     " samples, got " + std::to_string(n));
  }
  const double width = params.kernel_width.value_or(default_kernel_width(m));
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw InputError("kernel width must be a positive finite number");
  }

  std::vector<double> x_z(m);
  for (std::size_t j = 0; j < m; ++j) {
    x_z[j] = z_score(x[j], stats.col_means[j], stats.col_stds[j]);
  }

  GaussianSource noise(params.seed);
  Matrix u(n, m);
  std::vector<double> y(n), pi(n);
  std::vector<double> z(m);
  for (std::size_t s = 0; s < n; ++s) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      z[j] = x[j] + noise.next() * stats.col_stds[j];
      u(s, j) = z_score(z[j], stats.col_means[j], stats.col_stds[j]);
      const double d = u(s, j) - x_z[j];
      dist2 += d * d;
    }
    y[s] = model.evaluate(z);
    pi[s] = std::exp(-dist2 / (width * width));
  }
  if (std::all_of(pi.begin(), pi.end(), [](double w) { return w < 1e-12; })) {
    throw DegenerateError("all perturbation weights vanish; widen the kernel");
  }

  const auto fit = fit_sparse_linear(u, y, pi, k);
  LocalExplanation out;
  out.instance = instance;
  out.selected_indices = fit.selected;
  for (std::size_t j : fit.selected) {
    out.selected.push_back(stats.column_names.empty() ? std::to_string(j)
                                                      : stats.column_names[j]);
  }
  out.weights = fit.weights;
  out.intercept = fit.intercept;
  out.samples_used = n;
  out.kernel_width = width;
  return out;
}

SurrogateFit fit_sparse_linear(const Matrix& design, std::span<const double> y,
                               std::span<const double> sample_weights,
                               std::size_t k) {
  const std::size_t n = design.rows();
  const std::size_t m = design.cols();
  if (y.size() != n || sample_weights.size() != n) {
    throw InputError("surrogate fit inputs differ in length");
  }
  if (k == 0) throw InputError("explanation length K must be at least 1");
  const auto& pi = sample_weights;

  LocalDesign d{Matrix(m, m), std::vector<double>(m, 0.0),
                std::vector<double>(m, 0.0)};
  d.total_weight = ordered_sum(pi);
  if (!(d.total_weight > 0.0)) throw DegenerateError("sample weights sum to zero");
  for (std::size_t s = 0; s < n; ++s) {
    d.y_mean += pi[s] * y[s];
    for (std::size_t j = 0; j < m; ++j) d.col_mean[j] += pi[s] * design(s, j);
  }
  d.y_mean /= d.total_weight;
  for (double& c : d.col_mean) c /= d.total_weight;

  std::vector<double> c(m);
  for (std::size_t s = 0; s < n; ++s) {
    const double r = y[s] - d.y_mean;
    for (std::size_t j = 0; j < m; ++j) c[j] = design(s, j) - d.col_mean[j];
    for (std::size_t a = 0; a < m; ++a) {
      d.cross[a] += pi[s] * c[a] * r;
      for (std::size_t b = a; b < m; ++b) d.gram(a, b) += pi[s] * c[a] * c[b];
    }
  }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < a; ++b) d.gram(a, b) = d.gram(b, a);

  // Columns without weighted spread (constant features) cannot be fitted.
  std::vector<bool> usable(m);
  for (std::size_t j = 0; j < m; ++j) {
    usable[j] = d.gram(j, j) > 1e-12 * d.total_weight;
  }

  const std::size_t target = std::min(k, m);
  std::vector<std::size_t> selected;
  std::vector<bool> taken(m, false);
  if (target == m) {
    for (std::size_t j = 0; j < m; ++j) selected.push_back(j);
  } else {
    std::vector<std::size_t> fitted;  // usable members of `selected`
    while (selected.size() < target) {
      std::optional<std::size_t> best;
      double best_gain = -1.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (taken[j] || !usable[j]) continue;
        auto trial = fitted;
        trial.push_back(j);
        const auto q = explained(d, trial);
        if (q && *q > best_gain) {
          best_gain = *q;
          best = j;
        }
      }
      if (!best) {
        // Only unusable columns remain; they enter with zero weight.
        for (std::size_t j = 0; j < m && selected.size() < target; ++j) {
          if (!taken[j]) {
            taken[j] = true;
            selected.push_back(j);
          }
        }
        break;
      }
      taken[*best] = true;
      selected.push_back(*best);
      fitted.push_back(*best);
    }
  }

  std::vector<std::size_t> fit_set;
  for (std::size_t j : selected) {
    if (!usable[j]) continue;
    auto trial = fit_set;
    trial.push_back(j);
    if (explained(d, trial)) fit_set = std::move(trial);
  }

  SurrogateFit out;
  out.selected = selected;
  out.weights.assign(selected.size(), 0.0);
  out.intercept = d.y_mean;
  if (!fit_set.empty()) {
    const std::size_t p = fit_set.size();
    Matrix g(p, p);
    std::vector<double> rhs(p);
    for (std::size_t a = 0; a < p; ++a) {
      rhs[a] = d.cross[fit_set[a]];
      for (std::size_t b = 0; b < p; ++b) g(a, b) = d.gram(fit_set[a], fit_set[b]);
    }
    const auto coef = linalg::cholesky_solve(g, rhs);
    if (!coef) throw DegenerateError("weighted design is singular");
    for (std::size_t a = 0; a < p; ++a) {
      const auto pos = static_cast<std::size_t>(
          std::find(selected.begin(), selected.end(), fit_set[a]) - selected.begin());
      out.weights[pos] = (*coef)[a];
      out.intercept -= (*coef)[a] * d.col_mean[fit_set[a]];
    }
  }
  return out;
}

ExplanationMatrix explanation_matrix(const BlackBoxModel& model,
                                     const ObservationTable& table,
                                     const StandardizationStats& stats,
                                     const ExplainParams& params) {
  validate(table);
  if (table.n_cols() != model.n_features()) {
    throw InputError("table width does not match the model");
  }
  if (stats.column_names != table.column_names) {
    throw InputError("standardization stats do not match the table columns");
  }
  ExplanationMatrix out;
  out.column_names = table.column_names;
  out.weights = Matrix(table.n_rows(), table.n_cols());
  out.explanations.reserve(table.n_rows());
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    ExplainParams row_params = params;
    row_params.seed = params.seed + i;
    auto e = explain_instance(model, table.values.row(i), stats, row_params, i);
    for (std::size_t a = 0; a < e.selected_indices.size(); ++a) {
      out.weights(i, e.selected_indices[a]) = e.weights[a];
    }
    out.explanations.push_back(std::move(e));
  }
  return out;
}

std::vector<double> global_feature_importance(const Matrix& expl) {
  std::vector<double> importance(expl.cols(), 0.0);
  for (std::size_t j = 0; j < expl.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < expl.rows(); ++i) s += std::abs(expl(i, j));
    importance[j] = std::sqrt(s);
  }
  return importance;
}

double coverage(const Matrix& expl, std::span<const double> importance,
                std::span<const std::size_t> rows) {
  double total = 0.0;
  for (std::size_t j = 0; j < expl.cols(); ++j) {
    const bool covered = std::any_of(rows.begin(), rows.end(),
                                     [&](std::size_t i) { return expl(i, j) != 0.0; });
    if (covered) total += importance[j];
  }
  return total;
}

PickResult submodular_pick(const Matrix& expl, std::size_t budget) {
  PickResult out;
  out.feature_importance = global_feature_importance(expl);
  std::vector<bool> covered(expl.cols(), false);
  std::vector<bool> picked(expl.rows(), false);

  while (out.selected_rows.size() < budget) {
    std::optional<std::size_t> best;
    double best_gain = 0.0;
    for (std::size_t i = 0; i < expl.rows(); ++i) {
      if (picked[i]) continue;
      double gain = 0.0;
      for (std::size_t j = 0; j < expl.cols(); ++j) {
        if (!covered[j] && expl(i, j) != 0.0) gain += out.feature_importance[j];
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (!best) break;
    picked[*best] = true;
    out.selected_rows.push_back(*best);
    for (std::size_t j = 0; j < expl.cols(); ++j) {
      if (expl(*best, j) != 0.0) covered[j] = true;
    }
  }
  out.coverage_score = coverage(expl, out.feature_importance, out.selected_rows);
  return out;
}

AgreementSummary compare_with_pie(const PieReport& report,
                                  const ExplanationMatrix& expl) {
  if (report.rows.size() != expl.weights.rows() ||
      expl.explanations.size() != expl.weights.rows()) {
    throw InputError("PIE report and explanation matrix cover different row counts");
  }
  AgreementSummary out;
  std::size_t in_selected = 0;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& pie_row = report.rows[i];
    RowAgreement row{.row = i};
    if (!pie_row.degenerate && pie_row.top_driver) {
      row.active = true;
      ++out.active_rows;
      const std::size_t top = pie_row.top_driver->index;
      const auto& sel = expl.explanations[i].selected_indices;
      row.in_selected = std::find(sel.begin(), sel.end(), top) != sel.end();

      const auto w = expl.weights.row(i);
      std::size_t largest = 0;
      for (std::size_t j = 1; j < w.size(); ++j) {
        if (std::abs(w[j]) > std::abs(w[largest])) largest = j;
      }
      row.matches_largest = w[largest] != 0.0 && largest == top;
      in_selected += row.in_selected ? 1 : 0;
      matches += row.matches_largest ? 1 : 0;
    }
    out.rows.push_back(row);
  }
  if (out.active_rows > 0) {
    const auto denom = static_cast<double>(out.active_rows);
    out.fraction_in_selected = static_cast<double>(in_selected) / denom;
    out.fraction_matches_largest = static_cast<double>(matches) / denom;
  }
  return out;
}

}  // namespace pie
