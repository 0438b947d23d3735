#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "elliptica/error.hpp"
#include "elliptica/exponents.hpp"
#include "elliptica/nonlinearity.hpp"
#include "elliptica/profile.hpp"
#include "elliptica/quadrature.hpp"
#include "elliptica/stability.hpp"
#include "elliptica/test_function.hpp"

namespace elliptica {

/// |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2).
inline double sphere_area(int N) {
  return 2.0 * std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0);
}

inline TestFunction zeta_theorem1(double R1, double R) {
  if (!(R1 > 2.0)) throw std::invalid_argument("zeta_theorem1 needs R1 > 2");
  if (!(R > R1)) throw std::invalid_argument("zeta_theorem1 needs R > R1");
  const double c = std::pow(R1, 4);
  std::ostringstream name;
  name << "thm1(R1=" << R1 << ",R=" << R << ")";
  return TestFunction({0.0, R1, R, R * R},
                      {piece::Power{1.0, 4.0}, piece::Constant{c}, piece::LogCap{c, R},
                       piece::Zero{}},
                      std::nullopt, name.str());
}

/// Cut-off supported in [1, R2^2]: 2^a (r-1), r^a, R^a, then a logarithmic cap.
/// Passing alpha - eps gives the perturbed exponent used in the borderline dimension.
inline TestFunction zeta_theorem8(double alpha, double R, double R2) {
  if (!(alpha > 0.0)) throw std::invalid_argument("zeta_theorem8 needs alpha > 0");
  if (!(R > 2.0) || !(R2 > R)) throw std::invalid_argument("zeta_theorem8 needs R2 > R > 2");
  const double ta = std::pow(2.0, alpha), Ra = std::pow(R, alpha);
  std::ostringstream name;
  name << "thm8(alpha=" << alpha << ",R=" << R << ",R2=" << R2 << ")";
  return TestFunction({0.0, 1.0, 2.0, R, R2, R2 * R2},
                      {piece::Zero{}, piece::Linear{ta, -ta}, piece::Power{1.0, alpha},
                       piece::Constant{Ra}, piece::LogCap{Ra, R2}, piece::Zero{}},
                      alpha, name.str());
}

/// Coefficient of int r^{2-N} u_r^2 zeta^2 collected from both sides on a piece zeta = r^a:
/// -2a (gradient term, radial part) + a(6 - N + a) (dilation term) - (N-2)(10-N)/4.
inline double radial_coefficient(double N, double a) {
  return a * a + (4.0 - N) * a - (N - 2.0) * (10.0 - N) / 4.0;
}

/// Residual of the radial cancellation at a = alpha(N); the identity is exact.
inline double cancellation_identity(int N) {
  if (N < 3) throw std::invalid_argument("cancellation_identity needs N >= 3");
  return radial_coefficient(N, alpha_exponent(N));
}

enum class Verdict { Holds, Violated, Indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Violated: return "Violated";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

struct LedgerTerm {
  std::string name;
  std::string side;  // "lhs", "rhs" or "diagnostic"
  double value = 0.0;
  double error = 0.0;
};

struct StabilityPrecondition {
  bool checked = false;
  bool overridden = false;
  bool stable = false;
  std::string domain;
  double lambda1 = 0.0;
};

struct InequalityLedger {
  std::string kind;
  std::string profile_id;
  int dim = 0;
  int level = 1;
  TestFunction zeta;
  std::vector<LedgerTerm> terms;
  double lhs = 0.0, rhs = 0.0;
  double lhs_error = 0.0, rhs_error = 0.0;
  double slack = 0.0;
  double quadrature_error = 0.0;
  Verdict verdict = Verdict::Indeterminate;
  StabilityPrecondition precondition;

  double largest_term() const {
    double m = 0.0;
    for (const auto& t : terms)
      if (t.side != "diagnostic") m = std::max(m, std::abs(t.value));
    return m;
  }
  /// slack >= -error: what a stable profile must satisfy.
  bool consistent() const { return slack >= -quadrature_error; }
  const LedgerTerm* find(const std::string& name) const {
    for (const auto& t : terms)
      if (t.name == name) return &t;
    return nullptr;
  }
};

struct LedgerOptions {
  int level = 1;  // sub-panels per quadrature panel
  bool check_stability = true;
  bool override_stability = false;  // evaluate even when the precondition fails
  std::size_t resolution = 2048;
  double tol_spec = kDefaultTolSpec;
};

namespace detail {

inline std::string interval_label(double a, double b) {
  std::ostringstream s;
  s << "[" << a << "," << b << ")";
  return s.str();
}

inline void finish_ledger(InequalityLedger& L) {
  L.lhs = L.rhs = L.lhs_error = L.rhs_error = 0.0;
  for (const auto& t : L.terms) {
    if (t.side == "lhs") {
      L.lhs += t.value;
      L.lhs_error += t.error;
    } else if (t.side == "rhs") {
      L.rhs += t.value;
      L.rhs_error += t.error;
    }
  }
  L.slack = L.rhs - L.lhs;
  L.quadrature_error = L.lhs_error + L.rhs_error;
  if (std::abs(L.slack) <= L.quadrature_error) L.verdict = Verdict::Indeterminate;
  else L.verdict = L.slack > 0.0 ? Verdict::Holds : Verdict::Violated;
}

inline StabilityPrecondition check_support_stability(const RadialProfile& p, const Nonlinearity& f,
                                                     const TestFunction& z,
                                                     const LedgerOptions& o) {
  StabilityPrecondition s;
  if (!o.check_stability) {
    s.overridden = true;
    return s;
  }
  double a = z.support_start(), b = z.support_end();
  Domain d = a > 0.0 ? Domain(Annulus{a, b}) : Domain(Ball{b});
  auto L = linearize(p, f, d, o.resolution);
  s.checked = true;
  s.domain = describe(d);
  s.lambda1 = L.pencil.eigenvalue(0);
  s.stable = L.pencil.count_below(-o.tol_spec) == 0;
  if (!s.stable) {
    if (!o.override_stability)
      throw PreconditionError("profile is not stable on the support of the test function (" +
                              s.domain + ")");
    s.overridden = true;
  }
  return s;
}

// Panels: zeta breakpoints and profile nodes inside the support.
inline std::vector<double> ledger_panels(const RadialProfile& p, const TestFunction& z, double lo,
                                         double hi) {
  return merge_breakpoints(z.breakpoints(), p.r(), lo, hi);
}

}  // namespace detail

/// Radial reduction of the dilation inequality,
///   2 int r^{2-N} |grad u|^2 zeta r zeta'  <=  int r^{2-N} u_r^2 r zeta' ((6-N) zeta + r zeta'),
/// integrated piece by piece over the support of zeta (volume element |S| r^{N-1} dr).
inline InequalityLedger evaluate_radial_22(const RadialProfile& p, const TestFunction& z,
                                           const Nonlinearity& f, const LedgerOptions& o = {}) {
  if (z.support_end() > p.r_max() * (1.0 + 1e-12))
    throw std::invalid_argument("support of zeta exceeds the profile mesh");
  InequalityLedger L{"radial-dilation", p.id(), p.dim(), o.level, z, {}};
  L.precondition = detail::check_support_stability(p, f, z, o);
  const int N = p.dim();
  const double S = sphere_area(N);
  const auto& br = z.breakpoints();
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    if (std::holds_alternative<piece::Zero>(z.pieces()[i])) continue;
    double a = br[i], b = br[i + 1];
    auto panels = detail::ledger_panels(p, z, a, b);
    auto lhs = integrate_panels(
        [&](double r) {
          double ur = p.du_at(r);
          return 2.0 * S * r * ur * ur * z(r) * z.r_dzeta(r);
        },
        panels, o.level);
    auto rhs = integrate_panels(
        [&](double r) {
          double ur = p.du_at(r), rz = z.r_dzeta(r);
          return S * r * ur * ur * rz * ((6.0 - N) * z(r) + rz);
        },
        panels, o.level);
    auto lab = detail::interval_label(a, b);
    L.terms.push_back({"gradient" + lab, "lhs", lhs.value, lhs.error});
    L.terms.push_back({"dilation" + lab, "rhs", rhs.value, rhs.error});
  }
  detail::finish_ledger(L);
  return L;
}

/// Weighted inequality for cut-offs supported outside B_1, 3 <= N <= 10:
///   (N-2)(10-N)/4 int r^{2-N} u_r^2 zeta^2
///     <= -2 int r^{2-N} |grad u|^2 zeta r zeta' + int r^{2-N} u_r^2 r zeta' ((6-N) zeta + r zeta').
/// |grad u|^2 = u_r^2 + |grad_T u|^2; the tangential part is carried as its own term and is
/// identically zero for radial profiles. On power pieces zeta = r^a the diagnostic
/// "net_radial" collects every u_r^2 contribution (it vanishes when a = alpha(N)).
inline InequalityLedger evaluate_pohozaev(const RadialProfile& p, const TestFunction& z,
                                          const Nonlinearity& f, const LedgerOptions& o = {}) {
  const int N = p.dim();
  if (N < 3 || N > 10) throw std::invalid_argument("evaluate_pohozaev needs 3 <= N <= 10");
  if (z.support_start() < 1.0) throw std::invalid_argument("zeta must vanish on the unit ball");
  if (z.support_end() > p.r_max() * (1.0 + 1e-12))
    throw std::invalid_argument("support of zeta exceeds the profile mesh");
  InequalityLedger L{"pohozaev", p.id(), N, o.level, z, {}};
  L.precondition = detail::check_support_stability(p, f, z, o);
  const double S = sphere_area(N);
  const double cN = (N - 2.0) * (10.0 - N) / 4.0;
  const auto& br = z.breakpoints();
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const auto& pc = z.pieces()[i];
    if (std::holds_alternative<piece::Zero>(pc)) continue;
    double a = br[i], b = br[i + 1];
    auto panels = detail::ledger_panels(p, z, a, b);
    auto lab = detail::interval_label(a, b);
    auto lhs = integrate_panels(
        [&](double r) {
          double ur = p.du_at(r), zz = z(r);
          return cN * S * r * ur * ur * zz * zz;
        },
        panels, o.level);
    auto grad = integrate_panels(
        [&](double r) {
          double ur = p.du_at(r);
          return -2.0 * S * r * ur * ur * z(r) * z.r_dzeta(r);
        },
        panels, o.level);
    auto dil = integrate_panels(
        [&](double r) {
          double ur = p.du_at(r), rz = z.r_dzeta(r);
          return S * r * ur * ur * rz * ((6.0 - N) * z(r) + rz);
        },
        panels, o.level);
    L.terms.push_back({"weighted_radial" + lab, "lhs", lhs.value, lhs.error});
    L.terms.push_back({"gradient_radial" + lab, "rhs", grad.value, grad.error});
    L.terms.push_back({"gradient_tangential" + lab, "rhs", 0.0, 0.0});
    L.terms.push_back({"dilation" + lab, "rhs", dil.value, dil.error});
    if (auto pw = std::get_if<piece::Power>(&pc)) {
      auto net = integrate_panels(
          [&](double r) {
            double ur = p.du_at(r), zz = z(r);
            return radial_coefficient(N, pw->k) * S * r * ur * ur * zz * zz;
          },
          panels, o.level);
      L.terms.push_back({"net_radial" + lab, "diagnostic", net.value, net.error});
    }
  }
  detail::finish_ledger(L);
  return L;
}

struct EnergyGrowth {
  std::vector<double> radii;
  std::vector<double> energy;  // |S| int_0^R r^{2-N} u_r^2 r^{N-1} dr
  std::vector<double> error;
  std::vector<double> ratio;   // energy / ln R
  double slope = 0.0;          // least-squares d energy / d ln R
  double intercept = 0.0;
  bool strictly_decreasing = false;
  bool strictly_increasing = false;
};

inline std::vector<double> dyadic_radii(int k_lo, int k_hi) {
  std::vector<double> r;
  for (int k = k_lo; k <= k_hi; ++k) r.push_back(std::ldexp(1.0, k));
  return r;
}

inline EnergyGrowth weighted_energy_growth(const RadialProfile& p, const std::vector<double>& radii,
                                           int level = 1) {
  EnergyGrowth g;
  const double S = sphere_area(p.dim());
  QuadResult acc;
  double prev = 0.0;
  for (double R : radii) {
    if (!(R > 1.0)) throw std::invalid_argument("weighted energy radii must exceed 1");
    if (R > p.r_max() * (1.0 + 1e-12))
      throw std::invalid_argument("radius beyond the profile mesh");
    if (R < prev) throw std::invalid_argument("radii must be increasing");
    auto panels = merge_breakpoints(p.r(), {}, prev, R);
    acc += integrate_panels(
        [&](double r) {
          double ur = p.du_at(r);
          return S * r * ur * ur;
        },
        panels, level);
    prev = R;
    g.radii.push_back(R);
    g.energy.push_back(acc.value);
    g.error.push_back(acc.error);
    g.ratio.push_back(acc.value / std::log(R));
  }
  g.strictly_decreasing = g.strictly_increasing = g.ratio.size() >= 2;
  for (std::size_t i = 1; i < g.ratio.size(); ++i) {
    if (!(g.ratio[i] < g.ratio[i - 1])) g.strictly_decreasing = false;
    if (!(g.ratio[i] > g.ratio[i - 1])) g.strictly_increasing = false;
  }
  const std::size_t n = g.radii.size();
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double x = std::log(g.radii[i]), y = g.energy[i];
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    g.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    g.intercept = (sy - g.slope * sx) / n;
  }
  return g;
}

struct H1Ratio {
  double R = 0.0;
  double gradient_energy = 0.0;  // int_{B_R} |grad u|^2
  double average = 0.0;          // mean of u over B_{2R}
  std::optional<double> ratio;   // empty when the average vanishes
  bool average_positive = false;
};

/// int_{B_R} |grad u|^2 / (R^{N-2} (mean_{B_2R} u)^2).
inline H1Ratio h1_ratio(const RadialProfile& p, double R, int level = 1) {
  if (!(R > 0.0) || 2.0 * R > p.r_max() * (1.0 + 1e-12))
    throw std::invalid_argument("h1_ratio needs the profile on [0, 2R]");
  const int N = p.dim();
  const double S = sphere_area(N);
  H1Ratio h;
  h.R = R;
  auto g = integrate_panels(
      [&](double r) {
        double ur = p.du_at(r);
        return S * ur * ur * std::pow(r, N - 1);
      },
      merge_breakpoints(p.r(), {}, 0.0, R), level);
  auto m = integrate_panels([&](double r) { return p.u_at(r) * std::pow(r, N - 1); },
                            merge_breakpoints(p.r(), {}, 0.0, 2.0 * R), level);
  h.gradient_energy = g.value;
  h.average = m.value * N / std::pow(2.0 * R, N);
  h.average_positive = h.average > 0.0;
  double denom = std::pow(R, N - 2) * h.average * h.average;
  if (denom > 1e-300 * std::max(1.0, g.value)) h.ratio = g.value / denom;
  return h;
}

}  // namespace elliptica
