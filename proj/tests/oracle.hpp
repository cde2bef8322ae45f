#pragma once

// Brute-force reference implementations used only by tests. They follow the
// literal formulas on nested vectors and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline std::vector<double> clipped_z(const std::vector<double>& v) {
  const double mu = mean(v);
  const double sd = sample_std(v);
  bool constant = true;
  for (double x : v) constant = constant && x == v.front();
  std::vector<double> out(v.size(), 0.0);
  if (constant) return out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double z = (v[i] - mu) / sd;
    out[i] = z < 0 ? 0 : z;
  }
  return out;
}

inline Rows clipped_z_columns(const Rows& x) {
  const std::size_t n = x.size(), m = x.front().size();
  Rows out(n, std::vector<double>(m));
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = x[i][k];
    const auto z = clipped_z(col);
    for (std::size_t i = 0; i < n; ++i) out[i][k] = z[i];
  }
  return out;
}

struct Influence {
  Rows w;
  std::vector<double> s;
};

// W_ik = b_k x_ik / sum_k b_k x_ik over non-negative products.
inline Influence influence(const std::vector<double>& b, const Rows& x) {
  Influence out;
  for (const auto& row : x) {
    std::vector<double> p(row.size());
    double s = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      p[k] = std::max(0.0, b[k] * row[k]);
      s += p[k];
    }
    std::vector<double> w(row.size(), 0.0);
    if (s > 0) {
      for (std::size_t k = 0; k < row.size(); ++k) w[k] = p[k] / s;
    }
    out.w.push_back(w);
    out.s.push_back(s);
  }
  return out;
}

// First index of the maximum, nullopt for an all-zero row.
inline std::optional<std::size_t> argmax(const std::vector<double>& v) {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] > 0 && (!best || v[k] > v[*best])) best = k;
  }
  return best;
}

// The pseudocode's form: argmax_k (W_ik / S_i).
inline std::optional<std::size_t> argmax_over_s(const std::vector<double>& w,
                                                double s) {
  std::vector<double> q(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) q[k] = w[k] / s;
  return argmax(q);
}

struct Pipeline {
  std::vector<double> beta;
  Rows x;
  Influence infl;
  std::vector<std::optional<std::size_t>> top;
};

inline Pipeline standardized_pie(const std::vector<double>& beta, const Rows& x) {
  Pipeline out;
  out.beta = clipped_z(beta);
  out.x = clipped_z_columns(x);
  out.infl = influence(out.beta, out.x);
  for (const auto& w : out.infl.w) out.top.push_back(argmax(w));
  return out;
}

// Gaussian elimination with partial pivoting on the normal equations.
inline std::vector<double> solve(Rows a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

// Standardized OLS coefficients (intercept dropped).
inline std::vector<double> ols_standardized(const Rows& x,
                                            const std::vector<double>& y) {
  const std::size_t n = x.size(), m = x.front().size();
  Rows z(n, std::vector<double>(m + 1, 1.0));
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = x[i][k];
    const double mu = mean(col), sd = sample_std(col);
    for (std::size_t i = 0; i < n; ++i) z[i][k + 1] = (col[i] - mu) / sd;
  }
  Rows a(m + 1, std::vector<double>(m + 1, 0.0));
  std::vector<double> b(m + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r <= m; ++r) {
      b[r] += z[i][r] * y[i];
      for (std::size_t c = 0; c <= m; ++c) a[r][c] += z[i][r] * z[i][c];
    }
  auto coef = solve(a, b);
  return {coef.begin() + 1, coef.end()};
}

inline double abs_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return std::abs(sab) / std::sqrt(saa * sbb);
}

struct WlsFit {
  std::vector<double> coef;  // intercept first
  double rss = 0.0;
};

// Weighted least squares of y on [1, x[:, cols]].
inline WlsFit wls(const Rows& x, const std::vector<double>& y,
                  const std::vector<double>& w, const std::vector<std::size_t>& cols) {
  const std::size_t p = cols.size() + 1;
  Rows a(p, std::vector<double>(p, 0.0));
  std::vector<double> b(p, 0.0);
  auto feature = [&](std::size_t i, std::size_t r) {
    return r == 0 ? 1.0 : x[i][cols[r - 1]];
  };
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t r = 0; r < p; ++r) {
      b[r] += w[i] * feature(i, r) * y[i];
      for (std::size_t c = 0; c < p; ++c) a[r][c] += w[i] * feature(i, r) * feature(i, c);
    }
  WlsFit out{solve(a, b), 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    double pred = 0.0;
    for (std::size_t r = 0; r < p; ++r) pred += out.coef[r] * feature(i, r);
    out.rss += w[i] * (y[i] - pred) * (y[i] - pred);
  }
  return out;
}

// Forward stepwise selection by smallest weighted RSS, ties to lower index.
inline std::vector<std::size_t> forward_select(const Rows& x, const std::vector<double>& y,
                                               const std::vector<double>& w,
                                               std::size_t k) {
  std::vector<std::size_t> chosen;
  const std::size_t m = x.front().size();
  while (chosen.size() < k) {
    std::size_t best = m;
    double best_rss = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
      auto trial = chosen;
      trial.push_back(j);
      const double rss = wls(x, y, w, trial).rss;
      if (best == m || rss < best_rss) {
        best = j;
        best_rss = rss;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

// Exhaustive maximum of weighted coverage over subsets of size <= budget.
inline double best_coverage(const Rows& w, std::size_t budget) {
  const std::size_t n = w.size(), m = w.front().size();
  std::vector<double> imp(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += std::abs(w[i][j]);
    imp[j] = std::sqrt(s);
  }
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > budget) continue;
    double c = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      bool covered = false;
      for (std::size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1u && w[i][j] != 0.0) covered = true;
      if (covered) c += imp[j];
    }
    best = std::max(best, c);
  }
  return best;
}

inline Rows random_rows(std::mt19937_64& rng, std::size_t n, std::size_t m,
                        double lo = -5.0, double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Rows x(n, std::vector<double>(m));
  for (auto& row : x)
    for (auto& v : row) v = u(rng);
  return x;
}

}  // namespace oracle
