#pragma once

// Local surrogate explanations and submodular pick, used as a comparison
// baseline for PIE attributions.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pie/matrix.hpp"
#include "pie/pie_core.hpp"
#include "pie/standardize.hpp"
#include "pie/tabular_io.hpp"

namespace pie {

// Deterministic scoring function over an m-vector of raw feature values.
class BlackBoxModel {
 public:
  virtual ~BlackBoxModel() = default;
  virtual std::size_t n_features() const = 0;
  virtual double evaluate(std::span<const double> x) const = 0;
};

// f(x) = intercept + w . x
class LinearModel final : public BlackBoxModel {
 public:
  explicit LinearModel(std::vector<double> weights, double intercept = 0.0)
      : weights_(std::move(weights)), intercept_(intercept) {}

  std::size_t n_features() const override { return weights_.size(); }
  double evaluate(std::span<const double> x) const override;

 private:
  std::vector<double> weights_;
  double intercept_;
};

// Table lookup: returns the score of the nearest stored row, distance taken
// in z-scored coordinates. Ties go to the earliest row.
class NearestRowModel final : public BlackBoxModel {
 public:
  NearestRowModel(Matrix rows, std::vector<double> scores,
                  StandardizationStats stats);

  std::size_t n_features() const override { return rows_.cols(); }
  double evaluate(std::span<const double> x) const override;

 private:
  Matrix rows_;
  std::vector<double> scores_;
  StandardizationStats stats_;
};

struct ExplainParams {
  std::size_t n_samples = 500;
  std::size_t k_features = 3;
  // Unset means 0.75 * sqrt(m).
  std::optional<double> kernel_width;
  std::uint64_t seed = 42;
};

double default_kernel_width(std::size_t n_features);

struct LocalExplanation {
  std::size_t instance = 0;
  std::vector<std::size_t> selected_indices;  // in selection order
  std::vector<std::string> selected;
  std::vector<double> weights;  // per unit of z-scored feature
  double intercept = 0.0;
  std::size_t samples_used = 0;
  double kernel_width = 0.0;

  friend bool operator==(const LocalExplanation&, const LocalExplanation&) = default;
};

struct SurrogateFit {
  std::vector<std::size_t> selected;  // in selection order
  std::vector<double> weights;        // aligned with `selected`
  double intercept = 0.0;
};

// Weighted least squares with intercept on up to k columns of `design`,
// chosen by forward stepwise selection on weighted RSS (ties to the smaller
// column). With k >= m every column is used in index order. Columns without
// weighted spread can only enter last, with weight 0.
SurrogateFit fit_sparse_linear(const Matrix& design, std::span<const double> y,
                               std::span<const double> sample_weights,
                               std::size_t k);

// Gaussian perturbations around `x` (per-feature std from `stats`), weighted
// by exp(-d^2 / width^2) with d measured in z-scored units. Picks K features
// by forward stepwise selection on weighted RSS, then fits weighted least
// squares on them.
//
// Throws InputError when N < K + 1, K == 0, width <= 0 or sizes disagree;
// DegenerateError when every sample weight falls below 1e-12.
LocalExplanation explain_instance(const BlackBoxModel& model,
                                  std::span<const double> x,
                                  const StandardizationStats& stats,
                                  const ExplainParams& params,
                                  std::size_t instance = 0);

struct ExplanationMatrix {
  std::vector<std::string> column_names;
  Matrix weights;  // n x m; zero where a feature was not selected
  std::vector<LocalExplanation> explanations;
};

// Row i is explained with seed params.seed + i.
ExplanationMatrix explanation_matrix(const BlackBoxModel& model,
                                     const ObservationTable& table,
                                     const StandardizationStats& stats,
                                     const ExplainParams& params);

struct PickResult {
  std::vector<std::size_t> selected_rows;  // in pick order
  double coverage_score = 0.0;
  std::vector<double> feature_importance;  // I_j = sqrt(sum_i |W_ij|)
};

// I_j per column of an explanation matrix.
std::vector<double> global_feature_importance(const Matrix& expl);

// c(V) = sum_j I_j [some row in V has W_ij != 0].
double coverage(const Matrix& expl, std::span<const double> importance,
                std::span<const std::size_t> rows);

// Greedy maximization of coverage under |V| <= budget. Stops early when no
// row adds coverage; ties go to the smallest row index.
PickResult submodular_pick(const Matrix& expl, std::size_t budget);

struct RowAgreement {
  std::size_t row = 0;
  bool active = false;
  bool in_selected = false;     // PIE top driver among the selected features
  bool matches_largest = false; // PIE top driver is the largest-|w| feature
};

struct AgreementSummary {
  std::size_t active_rows = 0;
  double fraction_in_selected = 0.0;
  double fraction_matches_largest = 0.0;
  std::vector<RowAgreement> rows;
};

// Fractions are over rows PIE did not flag degenerate; 0 when there are none.
AgreementSummary compare_with_pie(const PieReport& report,
                                  const ExplanationMatrix& expl);

}  // namespace pie
