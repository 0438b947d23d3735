#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elliptica/nonlinearity.hpp"
#include "elliptica/profile.hpp"

namespace elliptica {

// Emden variables, t = ln r:
//   Exp:       v = u + 2t,      v'' + (N-2) v' + e^v - 2(N-2) = 0
//   Power(p):  w = r^m u, m = 2/(p-1),
//              w'' + (N-2-2m) w' - m(N-2-m) w + (w+)^p = 0
// Both are autonomous; the linearisation at the stationary point has characteristic
// polynomial lambda^2 + b lambda + c with b the damping and c = (p-1) m (N-2-m) (resp. 2(N-2)).

enum class EmdenKind { Exp, Power };

struct EmdenSpec {
  EmdenKind kind = EmdenKind::Exp;
  double p = 0.0;

  static EmdenSpec exp() { return {EmdenKind::Exp, 0.0}; }
  static EmdenSpec power(double p) { return {EmdenKind::Power, p}; }
  std::string name() const {
    return kind == EmdenKind::Exp ? std::string("exp") : "power:" + std::to_string(p);
  }
};

enum class FixedPointClass { SpiralSink, DegenerateNode, RealSink, Center, Source };

inline const char* to_string(FixedPointClass c) {
  switch (c) {
    case FixedPointClass::SpiralSink: return "SpiralSink";
    case FixedPointClass::DegenerateNode: return "DegenerateNode";
    case FixedPointClass::RealSink: return "RealSink";
    case FixedPointClass::Center: return "Center";
    case FixedPointClass::Source: return "Source";
  }
  return "?";
}

struct EmdenSystem {
  int dim = 3;
  EmdenSpec spec;
  double m = 0.0;           // 2/(p-1) for Power, unused for Exp
  double fixed_point = 0.0; // v* (Exp) or w* (Power); the derivative component is 0
  std::array<std::array<double, 2>, 2> jacobian{};
  double damping = 0.0;     // b
  double stiffness = 0.0;   // c
  double discriminant = 0.0;
  std::optional<long long> discriminant_exact;  // Exp with integer N
  std::array<std::complex<double>, 2> eigenvalues{};

  /// Right-hand side of the first-order system (v, v').
  std::array<double, 2> field(double v, double dv) const {
    const double N = dim;
    if (spec.kind == EmdenKind::Exp) return {dv, -(N - 2.0) * dv - std::exp(v) + 2.0 * (N - 2.0)};
    const double p = spec.p;
    double wp = v > 0.0 ? std::pow(v, p) : 0.0;
    return {dv, -(N - 2.0 - 2.0 * m) * dv + m * (N - 2.0 - m) * v - wp};
  }

  double fixed_point_residual() const {
    auto f = field(fixed_point, 0.0);
    return std::max(std::abs(f[0]), std::abs(f[1]));
  }

  double characteristic(std::complex<double> z) const {
    return std::abs(z * z + damping * z + stiffness);
  }
};

/// (N-2)^2 - 8(N-2) = (N-2)(N-10) in integer arithmetic.
inline long long exp_discriminant_exact(int N) {
  long long n = N;
  return (n - 2) * (n - 10);
}

inline EmdenSystem build_emden(EmdenSpec spec, int N) {
  if (N < 3) throw std::invalid_argument("Emden reduction needs N >= 3");
  EmdenSystem s;
  s.dim = N;
  s.spec = spec;
  const double n2 = N - 2.0;
  if (spec.kind == EmdenKind::Exp) {
    s.fixed_point = std::log(2.0 * n2);
    s.damping = n2;
    s.stiffness = 2.0 * n2;
    s.discriminant_exact = exp_discriminant_exact(N);
    s.discriminant = static_cast<double>(*s.discriminant_exact);
  } else {
    const double p = spec.p;
    if (!(p > 1.0)) throw std::invalid_argument("power Emden system needs p > 1");
    if (!(p > static_cast<double>(N) / n2))
      throw std::invalid_argument("singular amplitude undefined: need p > N/(N-2)");
    s.m = 2.0 / (p - 1.0);
    const double k = s.m * (n2 - s.m);
    s.fixed_point = std::pow(k, 1.0 / (p - 1.0));
    s.damping = n2 - 2.0 * s.m;
    s.stiffness = (p - 1.0) * k;
    s.discriminant = s.damping * s.damping - 4.0 * s.stiffness;
  }
  s.jacobian = {{{0.0, 1.0}, {-s.stiffness, -s.damping}}};
  const std::complex<double> sq = std::sqrt(std::complex<double>(s.discriminant, 0.0));
  s.eigenvalues = {0.5 * (-s.damping - sq), 0.5 * (-s.damping + sq)};
  return s;
}

inline FixedPointClass classify_fixed_point(const EmdenSystem& s) {
  int disc_sign;
  if (s.discriminant_exact) {
    disc_sign = (*s.discriminant_exact > 0) - (*s.discriminant_exact < 0);
  } else {
    double scale = s.damping * s.damping + 4.0 * std::abs(s.stiffness);
    disc_sign = std::abs(s.discriminant) <= 1e-12 * scale ? 0 : (s.discriminant > 0 ? 1 : -1);
  }
  if (s.damping < 0.0) return FixedPointClass::Source;
  if (s.damping == 0.0) return disc_sign < 0 ? FixedPointClass::Center : FixedPointClass::Source;
  if (disc_sign < 0) return FixedPointClass::SpiralSink;
  if (disc_sign == 0) return FixedPointClass::DegenerateNode;
  return FixedPointClass::RealSink;
}

/// Closed-form singular solution: ln(2(N-2)/r^2) for Exp, A r^{-m} for Power.
struct SingularSolution {
  int dim = 3;
  EmdenSpec spec;
  double amplitude = 0.0;  // ln 2(N-2) for Exp, A for Power
  double m = 0.0;

  double value(double r) const {
    if (spec.kind == EmdenKind::Exp) return amplitude - 2.0 * std::log(r);
    return amplitude * std::pow(r, -m);
  }
  double d1(double r) const {
    if (spec.kind == EmdenKind::Exp) return -2.0 / r;
    return -m * amplitude * std::pow(r, -m - 1.0);
  }
  double d2(double r) const {
    if (spec.kind == EmdenKind::Exp) return 2.0 / (r * r);
    return m * (m + 1.0) * amplitude * std::pow(r, -m - 2.0);
  }
  double f(double t) const {
    if (spec.kind == EmdenKind::Exp) return std::exp(t);
    return t > 0.0 ? std::pow(t, spec.p) : 0.0;
  }
  double fprime(double t) const {
    if (spec.kind == EmdenKind::Exp) return std::exp(t);
    return t > 0.0 ? spec.p * std::pow(t, spec.p - 1.0) : 0.0;
  }
  /// -Delta u_s - f(u_s) at r.
  double residual(double r) const {
    return -(d2(r) + (dim - 1.0) / r * d1(r)) - f(value(r));
  }
  double residual_scale(double r) const {
    return std::abs(d2(r)) + std::abs((dim - 1.0) / r * d1(r)) + std::abs(f(value(r)));
  }
  /// The linearised potential f'(u_s(r)), equal to c / r^2.
  double potential(double r) const { return fprime(value(r)); }
};

struct ResidualCertificate {
  double r_min = 1e-3, r_max = 1e3;
  std::size_t samples = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double tol = 1e-11;
  bool passed = false;
};

inline SingularSolution singular_solution(EmdenSpec spec, int N) {
  auto sys = build_emden(spec, N);
  SingularSolution s;
  s.dim = N;
  s.spec = spec;
  s.amplitude = sys.fixed_point;
  s.m = sys.m;
  return s;
}

/// Samples |-Delta u_s - f(u_s)| on a log grid. The verdict is on the residual relative to
/// the size of the individual terms; near r = 1e-3 the terms are O(1e7) so an absolute
/// 1e-11 would sit below the rounding floor.
inline ResidualCertificate certify_singular(const SingularSolution& s, double r_min = 1e-3,
                                           double r_max = 1e3, std::size_t samples = 601,
                                           double tol = 1e-11) {
  ResidualCertificate c;
  c.r_min = r_min;
  c.r_max = r_max;
  c.samples = samples;
  c.tol = tol;
  for (std::size_t i = 0; i < samples; ++i) {
    double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (samples - 1));
    double res = std::abs(s.residual(r));
    c.max_abs = std::max(c.max_abs, res);
    c.max_rel = std::max(c.max_rel, res / s.residual_scale(r));
  }
  c.passed = c.max_rel <= tol;
  return c;
}

struct EmdenTrajectory {
  std::vector<double> t, v, dv;
  double fixed_point = 0.0;
  double terminal_distance = 0.0;
  int crossings = 0;  // sign changes of v - v* above the noise floor
  bool oscillatory() const { return crossings >= 2; }
};

/// Pushes a radial profile through the Emden change of variables (nodes with r > 0).
inline EmdenTrajectory to_emden_trajectory(const RadialProfile& p, const EmdenSystem& sys,
                                           double noise = 1e-8) {
  EmdenTrajectory tr;
  tr.fixed_point = sys.fixed_point;
  const auto& r = p.r();
  const auto& u = p.u();
  const auto& du = p.du();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= 0.0) continue;
    double t = std::log(r[i]);
    double v, dv;
    if (sys.spec.kind == EmdenKind::Exp) {
      v = u[i] + 2.0 * t;
      dv = r[i] * du[i] + 2.0;
    } else {
      double rm = std::pow(r[i], sys.m);
      v = rm * u[i];
      dv = rm * (sys.m * u[i] + r[i] * du[i]);
    }
    tr.t.push_back(t);
    tr.v.push_back(v);
    tr.dv.push_back(dv);
  }
  if (tr.t.empty()) return tr;
  tr.terminal_distance = std::hypot(tr.v.back() - tr.fixed_point, tr.dv.back());
  const double thr = noise * (1.0 + std::abs(tr.fixed_point));
  int sign = 0;
  for (double v : tr.v) {
    double d = v - tr.fixed_point;
    if (std::abs(d) <= thr) continue;
    int s = d > 0 ? 1 : -1;
    if (sign != 0 && s != sign) ++tr.crossings;
    sign = s;
  }
  return tr;
}

}  // namespace elliptica
