#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace elliptica {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    panels += o.panels;
    return *this;
  }
};

/// Sorted, de-duplicated union of two breakpoint sets, clipped to [lo, hi].
inline std::vector<double> merge_breakpoints(const std::vector<double>& a,
                                             const std::vector<double>& b, double lo, double hi) {
  std::vector<double> out;
  out.reserve(a.size() + b.size() + 2);
  out.push_back(lo);
  for (double x : a)
    if (x > lo && x < hi) out.push_back(x);
  for (double x : b)
    if (x > lo && x < hi) out.push_back(x);
  out.push_back(hi);
  std::sort(out.begin(), out.end());
  std::vector<double> u;
  for (double x : out)
    if (u.empty() || x > u.back() * (1.0 + 1e-14) + 1e-300) u.push_back(x);
  if (u.back() != hi) u.back() = hi;
  return u;
}

/// Sums one 15-point Gauss-Kronrod rule per sub-panel; every panel between consecutive
/// breakpoints is cut into `level` equal pieces. The error is the sum of |K15 - G7|.
inline QuadResult integrate_panels(const std::function<double(double)>& f,
                                   const std::vector<double>& breaks, int level = 1) {
  using boost::math::quadrature::gauss_kronrod;
  if (level < 1) throw std::invalid_argument("quadrature level must be >= 1");
  QuadResult q;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    for (int k = 0; k < level; ++k) {
      double lo = a + (b - a) * k / level, hi = (k + 1 == level) ? b : a + (b - a) * (k + 1) / level;
      double err = 0.0;
      double v = gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0.0, &err);
      q.value += v;
      q.error += std::abs(err);
      ++q.panels;
    }
  }
  return q;
}

}  // namespace elliptica
