#pragma once

// Small dense solvers for the desk-scale regressions in this library.

#include <optional>
#include <vector>

#include "pie/matrix.hpp"

namespace pie::linalg {

// Solves the symmetric positive definite system A x = b by Cholesky.
// Returns nullopt if A is not numerically positive definite.
std::optional<std::vector<double>> cholesky_solve(const Matrix& a,
                                                  const std::vector<double>& b);

struct Eigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j pairs with values[j]
};

// Cyclic Jacobi rotations on a symmetric matrix.
Eigen symmetric_eigen(Matrix a);

}  // namespace pie::linalg
