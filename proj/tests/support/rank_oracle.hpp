#pragma once

// Independent reference computations for damped stationary scores. These
// build the dense transition matrix explicitly and share no code with
// instasum::power_iterate.

#include <cmath>
#include <cstddef>
#include <vector>

namespace instasum::testing {

using Matrix = std::vector<std::vector<double>>;

/// Row-stochastic transition matrix; rows without weight become uniform.
inline Matrix transition(const Matrix& w) {
  const std::size_t n = w.size();
  Matrix p(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (double x : w[j]) sum += x;
    for (std::size_t k = 0; k < n; ++k) p[j][k] = sum > 0.0 ? w[j][k] / sum : 1.0 / static_cast<double>(n);
  }
  return p;
}

/// Iterates s <- G s with G = (1-d)/n * 11^T + d * P^T until the L1 change
/// drops below `tol`.
inline std::vector<double> dense_fixed_point(const Matrix& w, double d, double tol = 1e-12,
                                             std::size_t max_iter = 100000) {
  const std::size_t n = w.size();
  const Matrix p = transition(w);
  Matrix g(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i][j] = (1.0 - d) / static_cast<double>(n) + d * p[j][i];

  std::vector<double> s(n, 1.0 / static_cast<double>(n)), next(n);
  for (std::size_t it = 0; it < max_iter; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) next[i] += g[i][j] * s[j];
      change += std::abs(next[i] - s[i]);
    }
    s.swap(next);
    if (change < tol) break;
  }
  double total = 0.0;
  for (double x : s) total += x;
  for (double& x : s) x /= total;
  return s;
}

/// Solves (I - d P^T) s = (1-d)/n * 1 by Gaussian elimination with partial
/// pivoting, then normalizes.
inline std::vector<double> linear_solve(const Matrix& w, double d) {
  const std::size_t n = w.size();
  const Matrix p = transition(w);
  Matrix a(n, std::vector<double>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - d * p[j][i];
    a[i][n] = (1.0 - d) / static_cast<double>(n);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> s(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += s[i] = a[i][n] / a[i][i];
  for (double& x : s) x /= total;
  return s;
}

}  // namespace instasum::testing
