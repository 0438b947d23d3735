#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elliptica/error.hpp"
#include "elliptica/exponents.hpp"
#include "elliptica/inequality_lab.hpp"
#include "elliptica/profile.hpp"
#include "elliptica/quadrature.hpp"
#include "elliptica/radial_solver.hpp"

namespace elliptica {

/// Subtracts the limit of u at infinity. The limit comes from geometric extrapolation of
/// dyadic differences when they contract, otherwise from the mean over the last dyadic band
/// provided its total variation is below tv_rel (1 + |u|).
inline RadialProfile normalize_to_zero_limit(const RadialProfile& p, double tv_rel = 1e-4) {
  const auto& r = p.r();
  const auto& u = p.u();
  const double R = p.r_max();
  double tv = 0.0, mean_num = 0.0, mean_den = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i] <= R / 2.0) continue;
    tv += std::abs(u[i] - u[i - 1]);
    double h = r[i] - std::max(r[i - 1], R / 2.0);
    mean_num += 0.5 * (u[i] + u[i - 1]) * h;
    mean_den += h;
  }
  auto tail = estimate_tail_limit(p, 0.5, tv_rel, 0.95);
  double limit;
  std::string how;
  if (tail.geometric) {
    limit = tail.limit;
    how = "dyadic extrapolation";
  } else if (tv <= tv_rel * (1.0 + std::abs(u.back())) && mean_den > 0.0) {
    limit = mean_num / mean_den;
    how = "last dyadic band mean";
  } else {
    // slope of u against ln r over the last band, e.g. -2 for the exponential family
    double slope = (u.back() - p.u_at(R / 2.0)) / std::log(2.0);
    throw NoFiniteLimitError("no finite limit at infinity (tail slope vs ln r = " +
                                 std::to_string(slope) + ")",
                             tv);
  }
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] - limit;
  Json meta = p.meta();
  meta["normalized_limit"] = limit;
  meta["normalized_by"] = how;
  RadialProfile q(p.dim(), r, std::move(v), p.du(), p.d2u(), std::move(meta), p.id() + "-normalized");
  return q.with_inf_estimate(std::min(0.0, p.inf_estimate() - limit));
}

enum class DecayQuantity { SupDeviation, GradientTail };

inline const char* to_string(DecayQuantity q) {
  return q == DecayQuantity::SupDeviation ? "SupDeviation" : "GradientTail";
}

struct DecayFit {
  DecayQuantity quantity = DecayQuantity::SupDeviation;
  double exponent = 0.0;
  double constant = 0.0;
  std::pair<double, double> fit_range{0.0, 0.0};
  double residual = 0.0;  // RMS of log residuals
  double bound = 0.0;
  double slack = 0.05;
  double drop_one_change = 0.0;  // max exponent change when dropping the first or last sample
  std::vector<double> radii, values;
  Verdict verdict = Verdict::Indeterminate;
  bool trivial = false;  // quantity identically zero
  std::string profile_id;
};

struct DecayOptions {
  double r_min = 16.0;
  int min_samples = 8;
  double residual_threshold = 0.05;
  double slack = 0.05;
  int level = 1;
};

namespace detail {

inline std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y,
                                            std::size_t from, std::size_t to, double* rms = nullptr) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = static_cast<double>(to - from);
  for (std::size_t i = from; i < to; ++i) {
    double a = std::log(x[i]), b = std::log(y[i]);
    sx += a; sy += b; sxx += a * a; sxy += a * b;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double icpt = (sy - slope * sx) / n;
  if (rms) {
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i) {
      double e = std::log(y[i]) - (icpt + slope * std::log(x[i]));
      s += e * e;
    }
    *rms = std::sqrt(s / n);
  }
  return {slope, icpt};
}

inline DecayFit fit_samples(DecayFit fit, const DecayOptions& o) {
  const std::size_t n = fit.radii.size();
  if (static_cast<int>(n) < o.min_samples)
    throw std::invalid_argument("decay fit needs at least " + std::to_string(o.min_samples) +
                                " dyadic radii (profile too short)");
  fit.fit_range = {fit.radii.front(), fit.radii.back()};
  fit.slack = o.slack;
  bool all_zero = std::all_of(fit.values.begin(), fit.values.end(), [](double v) { return v == 0.0; });
  if (all_zero) {
    fit.trivial = true;
    fit.exponent = -std::numeric_limits<double>::infinity();
    fit.verdict = Verdict::Holds;
    return fit;
  }
  if (std::any_of(fit.values.begin(), fit.values.end(), [](double v) { return !(v > 0.0); })) {
    fit.verdict = Verdict::Indeterminate;
    fit.exponent = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  double rms = 0.0;
  auto [slope, icpt] = loglog_fit(fit.radii, fit.values, 0, n, &rms);
  fit.exponent = slope;
  fit.constant = std::exp(icpt);
  fit.residual = rms;
  double a = loglog_fit(fit.radii, fit.values, 1, n).first;
  double b = loglog_fit(fit.radii, fit.values, 0, n - 1).first;
  fit.drop_one_change = std::max(std::abs(a - slope), std::abs(b - slope));
  if (rms > o.residual_threshold) fit.verdict = Verdict::Indeterminate;
  else fit.verdict = slope <= fit.bound + o.slack ? Verdict::Holds : Verdict::Violated;
  return fit;
}

inline std::vector<double> dyadic_from(double r_min, double r_max) {
  std::vector<double> R;
  for (double x = r_min; x <= r_max * (1.0 + 1e-12); x *= 2.0) R.push_back(x);
  return R;
}

inline void check_decay_dim(int N) {
  if (N < 3 || N > 10) throw std::invalid_argument("decay fits need 3 <= N <= 10");
}

}  // namespace detail

/// Log-log fit of sup_{r >= R} |u| over dyadic R (profile assumed normalised to limit 0).
inline DecayFit fit_sup_decay(const RadialProfile& p, const DecayOptions& o = {}) {
  detail::check_decay_dim(p.dim());
  DecayFit fit;
  fit.quantity = DecayQuantity::SupDeviation;
  fit.bound = sup_decay_bound(p.dim());
  fit.profile_id = p.id();
  const auto& r = p.r();
  const auto& u = p.u();
  // suffix maxima of |u|
  std::vector<double> suf(r.size());
  double m = 0.0;
  for (std::size_t i = r.size(); i-- > 0;) {
    m = std::max(m, std::abs(u[i]));
    suf[i] = m;
  }
  for (double R : detail::dyadic_from(o.r_min, p.r_max())) {
    std::size_t i = p.locate(R);
    double v = std::max(std::abs(p.u_at(R)), i + 1 < r.size() ? suf[i + 1] : 0.0);
    fit.radii.push_back(R);
    fit.values.push_back(v);
  }
  return detail::fit_samples(std::move(fit), o);
}

/// Log-log fit of the gradient energy |S| int_R^{2R} u_r^2 r^{N-1} dr over dyadic R.
inline DecayFit fit_gradient_tail(const RadialProfile& p, const DecayOptions& o = {}) {
  detail::check_decay_dim(p.dim());
  const int N = p.dim();
  const double S = sphere_area(N);
  DecayFit fit;
  fit.quantity = DecayQuantity::GradientTail;
  fit.bound = gradient_tail_bound(N);
  fit.profile_id = p.id();
  for (double R : detail::dyadic_from(o.r_min, p.r_max() / 2.0)) {
    auto q = integrate_panels(
        [&](double r) {
          double ur = p.du_at(r);
          return S * ur * ur * std::pow(r, N - 1);
        },
        merge_breakpoints(p.r(), {}, R, 2.0 * R), o.level);
    fit.radii.push_back(R);
    fit.values.push_back(q.value);
  }
  return detail::fit_samples(std::move(fit), o);
}

enum class NormVerdict { Finite, Divergent, Indeterminate };

inline const char* to_string(NormVerdict v) {
  switch (v) {
    case NormVerdict::Finite: return "Finite";
    case NormVerdict::Divergent: return "Divergent";
    case NormVerdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

struct L2StarEstimate {
  double exponent = 0.0;  // 2N/(N-2)
  double core = 0.0;      // integral over B_{r_min}
  std::vector<double> band_radii, bands;
  double ratio = std::numeric_limits<double>::quiet_NaN();  // last band ratio
  double tail_extrapolation = 0.0;
  double value = 0.0;
  NormVerdict verdict = NormVerdict::Indeterminate;
};

/// int |u|^{2N/(N-2)} over R^N by dyadic bands plus a geometric tail.
inline L2StarEstimate l2star_norm(const RadialProfile& p, double r_min = 2.0, int level = 1) {
  const int N = p.dim();
  if (N < 3) throw std::invalid_argument("l2star_norm needs N >= 3");
  L2StarEstimate e;
  e.exponent = sobolev_exponent(N);
  const double S = sphere_area(N);
  auto integrand = [&](double r) { return S * std::pow(std::abs(p.u_at(r)), e.exponent) * std::pow(r, N - 1); };
  e.core = integrate_panels(integrand, merge_breakpoints(p.r(), {}, 0.0, r_min), level).value;
  for (double R = r_min; 2.0 * R <= p.r_max() * (1.0 + 1e-12); R *= 2.0) {
    e.band_radii.push_back(R);
    e.bands.push_back(integrate_panels(integrand, merge_breakpoints(p.r(), {}, R, 2.0 * R), level).value);
  }
  double sum = e.core;
  for (double b : e.bands) sum += b;
  e.value = sum;
  const std::size_t n = e.bands.size();
  if (n < 3) return e;
  double b1 = e.bands[n - 3], b2 = e.bands[n - 2], b3 = e.bands[n - 1];
  if (b1 == 0.0 && b2 == 0.0 && b3 == 0.0) {
    e.ratio = 0.0;
    e.verdict = NormVerdict::Finite;
    return e;
  }
  if (b2 <= 0.0) return e;
  double q1 = b2 / b1, q2 = b3 / b2;
  e.ratio = q2;
  if (q2 < 0.9 && q1 < 0.9) {
    e.tail_extrapolation = b3 * q2 / (1.0 - q2);
    e.value += e.tail_extrapolation;
    e.verdict = NormVerdict::Finite;
  } else if (q2 >= 1.0) {
    e.value = std::numeric_limits<double>::infinity();
    e.verdict = NormVerdict::Divergent;
  }
  return e;
}

struct CAlphaRatio {
  double R = 0.0;
  double alpha_hold = 0.5;
  double seminorm = 0.0;      // [u]_{C^alpha(B_{R/2})}
  double mean_abs = 0.0;      // mean of |u| over B_R
  std::optional<double> ratio;  // R^alpha [u] / mean|u|, scale invariant
  double holder_bound = 0.0;  // R^{-alpha} mean|u|
};

/// Holder seminorm of a radial function over B_{R/2}: for radial u the supremum over pairs is
/// attained on a ray, so it reduces to sup |u(s) - u(t)| / |s - t|^alpha on [0, R/2].
inline CAlphaRatio calpha_ratio(const RadialProfile& p, double R, double alpha_hold,
                                std::size_t samples = 400, int level = 1) {
  if (!(alpha_hold > 0.0 && alpha_hold < 1.0))
    throw std::invalid_argument("Holder exponent must lie in (0, 1)");
  if (!(R > 0.0) || R > p.r_max() * (1.0 + 1e-12))
    throw std::invalid_argument("calpha_ratio needs the profile on [0, R]");
  const int N = p.dim();
  CAlphaRatio c;
  c.R = R;
  c.alpha_hold = alpha_hold;
  std::vector<double> s(samples + 1), v(samples + 1);
  for (std::size_t i = 0; i <= samples; ++i) {
    s[i] = 0.5 * R * static_cast<double>(i) / samples;
    v[i] = p.u_at(s[i]);
  }
  for (std::size_t i = 0; i <= samples; ++i)
    for (std::size_t j = i + 1; j <= samples; ++j)
      c.seminorm = std::max(c.seminorm, std::abs(v[j] - v[i]) / std::pow(s[j] - s[i], alpha_hold));
  auto m = integrate_panels([&](double r) { return std::abs(p.u_at(r)) * std::pow(r, N - 1); },
                            merge_breakpoints(p.r(), {}, 0.0, R), level);
  c.mean_abs = m.value * N / std::pow(R, N);
  c.holder_bound = std::pow(R, -alpha_hold) * c.mean_abs;
  if (c.mean_abs > 0.0) c.ratio = std::pow(R, alpha_hold) * c.seminorm / c.mean_abs;
  return c;
}

}  // namespace elliptica
