#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace elliptica {

/// Generalised eigenproblem K x = lambda W x, K symmetric tridiagonal, W positive diagonal.
/// Eigenvalue counts come from the inertia of K - sigma W (Sylvester), computed with the
/// LDL^T pivot recurrence directly on the pencil, so no W^{-1/2} scaling enters.
struct TridiagonalPencil {
  std::vector<double> diag;    // K_ii
  std::vector<double> off;     // K_{i,i+1}, size n-1
  std::vector<double> weight;  // W_ii > 0

  std::size_t size() const { return diag.size(); }

  void check() const {
    if (diag.empty() || off.size() + 1 != diag.size() || weight.size() != diag.size())
      throw std::invalid_argument("inconsistent tridiagonal pencil");
    for (double w : weight)
      if (!(w > 0.0)) throw std::invalid_argument("pencil weights must be positive");
  }

  /// Number of eigenvalues strictly below sigma.
  std::size_t count_below(double sigma) const {
    const std::size_t n = diag.size();
    std::size_t neg = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double a = diag[i] - sigma * weight[i];
      double q = (i == 0) ? a : a - off[i - 1] * off[i - 1] / d;
      if (q == 0.0) {
        double scale = std::abs(diag[i]) + std::abs(sigma * weight[i]) +
                       (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
        q = -std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
      }
      if (q < 0.0) ++neg;
      d = q;
    }
    return neg;
  }

  /// Gershgorin interval for the spectrum of W^{-1} K.
  std::pair<double, double> bounds() const {
    const std::size_t n = diag.size();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      double s = std::sqrt(weight[i]);
      // rows of W^{-1/2} K W^{-1/2}
      double rad_s = 0.0;
      if (i > 0) rad_s += std::abs(off[i - 1]) / (s * std::sqrt(weight[i - 1]));
      if (i + 1 < n) rad_s += std::abs(off[i]) / (s * std::sqrt(weight[i + 1]));
      double c = diag[i] / weight[i];
      lo = std::min(lo, c - rad_s);
      hi = std::max(hi, c + rad_s);
    }
    return {lo, hi};
  }

  /// k-th smallest eigenvalue (k = 0 is the lowest) by bisection on count_below.
  double eigenvalue(std::size_t k, double tol = 1e-10) const {
    if (k >= diag.size()) throw std::out_of_range("eigenvalue index out of range");
    auto [lo, hi] = bounds();
    double span = hi - lo;
    lo -= 1e-12 * std::abs(span) + 1e-300;
    hi += 1e-12 * std::abs(span) + 1e-300;
    for (int it = 0; it < 400; ++it) {
      double mid = 0.5 * (lo + hi);
      if (hi - lo <= tol * std::max(1.0, std::abs(mid))) break;
      if (count_below(mid) > k) hi = mid;
      else lo = mid;
    }
    return 0.5 * (lo + hi);
  }

  /// Symmetric tridiagonal W^{-1/2} K W^{-1/2}, for inspection and dense cross-checks.
  std::pair<std::vector<double>, std::vector<double>> symmetrized() const {
    const std::size_t n = diag.size();
    std::vector<double> d(n), e(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] / weight[i];
    for (std::size_t i = 0; i + 1 < n; ++i) e[i] = off[i] / std::sqrt(weight[i] * weight[i + 1]);
    return {d, e};
  }

  double quadratic_form(const std::vector<double>& x) const {
    const std::size_t n = diag.size();
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      q += diag[i] * x[i] * x[i];
      if (i + 1 < n) q += 2.0 * off[i] * x[i] * x[i + 1];
    }
    return q;
  }
};

}  // namespace elliptica
