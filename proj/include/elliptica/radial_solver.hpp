#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "elliptica/error.hpp"
#include "elliptica/nonlinearity.hpp"
#include "elliptica/ode.hpp"
#include "elliptica/profile.hpp"

namespace elliptica {

struct ShootingParams {
  int dim = 3;
  double center_value = 0.0;
  double r_max = 10.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double series_radius = 0.0;  // 0: chosen from the size of f and f' at the centre
  long max_steps = 2'000'000;
  double mesh_ratio = 1.02;
  double max_spacing = std::numeric_limits<double>::infinity();
  double blowup_guard = 1e8;
};

inline double auto_series_radius(const Nonlinearity& f, double a) {
  return 1e-3 / std::sqrt(1.0 + std::abs(f.deriv1(a)) + std::abs(f.eval(a)));
}

inline void check_params(const ShootingParams& sp) {
  if (sp.dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(sp.r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
  if (!(sp.rel_tol > 0.0 && sp.rel_tol <= 1e-2) || !(sp.abs_tol > 0.0 && sp.abs_tol <= 1e-2))
    throw std::invalid_argument("tolerances must lie in (0, 1e-2]");
  if (sp.series_radius < 0.0) throw std::invalid_argument("series radius must be positive");
  if (!std::isfinite(sp.center_value)) throw std::invalid_argument("center value must be finite");
}

/// Radial solution of u'' + (N-1)/r u' + f(u) = 0 with u(0) = a, u'(0) = 0.
/// The series u = a + c2 r^2 + c4 r^4 covers [0, r0]; Dormand-Prince covers the rest.
inline RadialProfile shoot(const Nonlinearity& f, const ShootingParams& sp) {
  check_params(sp);
  const double a = sp.center_value;
  const int N = sp.dim;
  const double r0 = sp.series_radius > 0.0 ? sp.series_radius : auto_series_radius(f, a);
  if (!(r0 * 10.0 < sp.r_max)) throw std::invalid_argument("series radius must be << r_max");

  const double fa = f.eval(a), f1a = f.deriv1(a);
  const double c2 = -fa / (2.0 * N);
  const double c4 = fa * f1a / (8.0 * N * (N + 2.0));

  auto mesh = graded_mesh(sp.r_max, r0, sp.mesh_ratio, 20, sp.max_spacing);
  const std::size_t n = mesh.size();
  std::vector<double> u(n), du(n), d2u(n);
  const double nm1 = N - 1.0;
  u[0] = a;
  du[0] = 0.0;
  d2u[0] = 2.0 * c2;
  const double r1 = mesh[1];
  u[1] = a + c2 * r1 * r1 + c4 * r1 * r1 * r1 * r1;
  du[1] = 2.0 * c2 * r1 + 4.0 * c4 * r1 * r1 * r1;
  d2u[1] = -nm1 / r1 * du[1] - f.eval(u[1]);

  Rhs2 rhs = [&f, nm1](const State2& y, State2& dy, double r) {
    dy[0] = y[1];
    dy[1] = -nm1 / r * y[1] - f.eval(y[0]);
  };
  OdeOptions oo;
  oo.rel_tol = sp.rel_tol;
  oo.abs_tol = sp.abs_tol;
  oo.max_steps = sp.max_steps;
  oo.blowup_guard = sp.blowup_guard;
  std::vector<double> nodes(mesh.begin() + 2, mesh.end());
  auto stats = integrate_to_nodes(
      rhs, r1, State2{u[1], du[1]}, nodes,
      [&](std::size_t i, const State2& y) {
        u[i + 2] = y[0];
        du[i + 2] = y[1];
        d2u[i + 2] = -nm1 / mesh[i + 2] * y[1] - f.eval(y[0]);
      },
      oo);

  Json meta = {{"method", "shooting"},
               {"nonlinearity", f.name},
               {"dim", N},
               {"center_value", a},
               {"r_max", sp.r_max},
               {"rel_tol", sp.rel_tol},
               {"abs_tol", sp.abs_tol},
               {"series_radius", r0},
               {"mesh_ratio", sp.mesh_ratio},
               {"steps_accepted", stats.accepted},
               {"steps_rejected", stats.rejected}};
  std::ostringstream id;
  id << f.name << "-N" << N << "-a" << a;
  return RadialProfile(N, std::move(mesh), std::move(u), std::move(du), std::move(d2u),
                       std::move(meta), id.str());
}

enum class ShotClass { Bounded, Crossing, Unbounded, BlowUp, Failed };

inline const char* to_string(ShotClass c) {
  switch (c) {
    case ShotClass::Bounded: return "Bounded";
    case ShotClass::Crossing: return "Crossing";
    case ShotClass::Unbounded: return "Unbounded";
    case ShotClass::BlowUp: return "BlowUp";
    case ShotClass::Failed: return "Failed";
  }
  return "?";
}

struct TailLimit {
  bool settled = false;   // the tail window has small total variation
  bool geometric = false; // dyadic differences contract geometrically
  double limit = std::numeric_limits<double>::quiet_NaN();
  double tail_variation = 0.0;
  double ratio = std::numeric_limits<double>::quiet_NaN();
};

/// Limit of u at infinity from the stored profile. First the total-variation gate on the
/// last `window` fraction of the mesh; failing that, dyadic differences
/// d_k = u(R/2^k) - u(R/2^{k+1}) with a contraction ratio q < q_max give an Aitken limit.
inline TailLimit estimate_tail_limit(const RadialProfile& p, double window = 0.1,
                                     double tv_rel = 1e-3, double q_max = 0.95) {
  TailLimit t;
  const auto& r = p.r();
  const auto& u = p.u();
  const double R = p.r_max();
  double tv = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i] > (1.0 - window) * R) tv += std::abs(u[i] - u[i - 1]);
  t.tail_variation = tv;
  const double uend = u.back();
  if (tv <= tv_rel * (1.0 + std::abs(uend))) {
    t.settled = true;
    t.limit = uend;
  }
  if (R / 8.0 > r[1]) {
    double u8 = p.u_at(R / 8.0), u4 = p.u_at(R / 4.0), u2 = p.u_at(R / 2.0);
    double d1 = u4 - u8, d2 = u2 - u4, d3 = uend - u2;
    if (d1 != 0.0 && d2 != 0.0) {
      double q1 = d2 / d1, q2 = d3 / d2;
      t.ratio = q2;
      bool contracting = q1 > 0.0 && q1 < q_max && q2 > 0.0 && q2 < q_max &&
                         std::abs(q2 - q1) < 0.25;
      if (contracting) {
        t.geometric = true;
        t.limit = uend + d3 * q2 / (1.0 - q2);
      }
    } else if (d2 == 0.0 && d3 == 0.0) {
      t.geometric = true;
      t.limit = uend;
    }
  }
  return t;
}

struct ShotClassification {
  ShotClass cls = ShotClass::Failed;
  TailLimit tail;
  std::string detail;
};

inline ShotClassification classify_shot(const RadialProfile& p, const Nonlinearity& f) {
  ShotClassification c;
  const auto& u = p.u();
  const auto& du = p.du();
  for (double z : f.zeros) {
    for (std::size_t i = 1; i < u.size(); ++i) {
      if ((u[i - 1] - z) * (u[i] - z) < 0.0) {
        c.cls = ShotClass::Crossing;
        c.detail = "crosses the zero " + std::to_string(z) + " of f";
        return c;
      }
    }
  }
  double dmax = 0.0;
  for (double d : du) dmax = std::max(dmax, std::abs(d));
  const double noise = 1e-9 * dmax;
  int sign = 0;
  for (std::size_t i = 1; i < du.size(); ++i) {
    int s = du[i] > noise ? 1 : (du[i] < -noise ? -1 : 0);
    if (s == 0) continue;
    if (sign != 0 && s != sign) {
      c.cls = ShotClass::Crossing;
      c.detail = "u' changes sign near r = " + std::to_string(p.r()[i]);
      return c;
    }
    sign = s;
  }
  c.tail = estimate_tail_limit(p);
  if (c.tail.settled || c.tail.geometric) {
    c.cls = ShotClass::Bounded;
    c.detail = c.tail.settled ? "tail variation below gate" : "geometric dyadic convergence";
  } else {
    c.cls = ShotClass::Unbounded;
    c.detail = "no finite limit detected";
  }
  return c;
}

/// Monotone one-dimensional profile u' = sqrt(2 (F(c) - F(u))), u(0) = 0, i.e. the
/// heteroclinic of u'' + f(u) = 0 joining 0 to the zero c of f.
inline RadialProfile halfspace_profile_1d(const Nonlinearity& f, double c, double x_max,
                                          double h = 1e-3, double residual_tol = 1e-8) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(c > 0.0)) throw std::invalid_argument("half-space profile needs a target zero c > 0");
  if (std::abs(f.eval(c)) > 1e-12 * (1.0 + c))
    throw std::invalid_argument("target c is not a zero of f");
  const int samples = 256;
  auto F_between = [&](double lo, double hi) {
    if (hi <= lo) return 0.0;
    return gauss_kronrod<double, 15>::integrate([&](double s) { return f.eval(s); }, lo, hi, 4,
                                                1e-13);
  };
  for (int i = 1; i < samples; ++i) {
    double t = c * i / samples;
    if (!(f.eval(t) > 0.0))
      throw std::invalid_argument("f must be positive on (0, c)");
    if (!(F_between(t, c) > 0.0))
      throw std::invalid_argument("F(c) <= F(t) for some t in (0, c): no monotone connection");
  }
  auto slope = [&](double v) {
    if (v >= c) return 0.0;
    return std::sqrt(2.0 * F_between(std::max(v, -1.0), c));
  };
  Rhs2 rhs = [&](const State2& y, State2& dy, double) {
    dy[0] = slope(y[0]);
    dy[1] = 0.0;
  };
  auto mesh = uniform_mesh(x_max, h);
  const std::size_t n = mesh.size();
  std::vector<double> u(n), du(n), d2u(n);
  u[0] = 0.0;
  OdeOptions oo;
  oo.rel_tol = 1e-12;
  oo.abs_tol = 1e-14;
  std::vector<double> nodes(mesh.begin() + 1, mesh.end());
  integrate_to_nodes(rhs, 0.0, State2{0.0, 0.0}, nodes,
                     [&](std::size_t i, const State2& y) { u[i + 1] = y[0]; }, oo);
  for (std::size_t i = 0; i < n; ++i) {
    du[i] = slope(u[i]);
    d2u[i] = -f.eval(u[i]);
  }
  Json meta = {{"method", "first-integral"}, {"nonlinearity", f.name}, {"target_zero", c},
               {"x_max", x_max}, {"h", h}};
  RadialProfile p(1, std::move(mesh), std::move(u), std::move(du), std::move(d2u),
                  std::move(meta), "halfspace-" + f.name);
  auto rep = validate_profile(p, f, residual_tol);
  if (!rep.passed)
    throw NonConvergenceError("half-space profile residual above tolerance", rep.max_abs);
  return p.with_meta("residual_max", rep.max_abs);
}

/// Centre value a in [a_lo, a_hi] whose shot vanishes at r = R (Dirichlet ball problem),
/// found by bisection on the sign of u(R). The bracket must straddle a sign change.
inline RadialProfile dirichlet_ball_profile(const Nonlinearity& f, int dim, double R, double a_lo,
                                            double a_hi, double tol = 1e-12) {
  ShootingParams sp;
  sp.dim = dim;
  sp.r_max = R;
  sp.mesh_ratio = 1.02;
  sp.max_spacing = R / 400.0;
  auto value_at_R = [&](double a) {
    sp.center_value = a;
    return shoot(f, sp).u().back();
  };
  double glo = value_at_R(a_lo), ghi = value_at_R(a_hi);
  if (glo * ghi > 0.0) throw std::invalid_argument("centre-value bracket does not straddle u(R) = 0");
  for (int it = 0; it < 200 && a_hi - a_lo > tol * (1.0 + std::abs(a_hi)); ++it) {
    double mid = 0.5 * (a_lo + a_hi);
    double g = value_at_R(mid);
    if ((g < 0.0) == (glo < 0.0)) {
      a_lo = mid;
      glo = g;
    } else {
      a_hi = mid;
    }
  }
  sp.center_value = 0.5 * (a_lo + a_hi);
  return shoot(f, sp);
}

}  // namespace elliptica
