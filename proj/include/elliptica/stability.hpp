#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "elliptica/emden.hpp"
#include "elliptica/error.hpp"
#include "elliptica/nonlinearity.hpp"
#include "elliptica/parallel.hpp"
#include "elliptica/profile.hpp"
#include "elliptica/sturm.hpp"

namespace elliptica {

struct Ball {
  double R = 1.0;
};
struct Annulus {
  double R1 = 0.1;
  double R2 = 10.0;
};
using Domain = std::variant<Ball, Annulus>;

inline std::string describe(const Domain& d) {
  if (auto b = std::get_if<Ball>(&d)) return "Ball(" + std::to_string(b->R) + ")";
  auto a = std::get<Annulus>(d);
  return "Annulus(" + std::to_string(a.R1) + ", " + std::to_string(a.R2) + ")";
}

inline double outer_radius(const Domain& d) {
  if (auto b = std::get_if<Ball>(&d)) return b->R;
  return std::get<Annulus>(d).R2;
}

constexpr double kDefaultTolSpec = 1e-6;

/// Radial part of -Delta - V on a ball or annulus, Dirichlet on the outer (and inner) sphere,
/// in the weighted form  int (phi'^2 - V phi^2) r^{N-1}  over  int phi^2 r^{N-1}.
/// Linear elements with exact element weights for the gradient term, lumped dual-cell
/// weights for the mass and the potential.
struct LinearizedOperator {
  int dim = 3;
  Domain domain = Ball{};
  std::size_t resolution = 0;    // number of mesh intervals
  std::vector<double> nodes;     // full mesh including boundary nodes
  std::vector<double> unknown_r; // radii of the unknowns
  std::vector<double> potential; // V at the unknowns
  TridiagonalPencil pencil;
  double profile_spacing = 0.0;  // max relative spacing of the sampled profile inside the domain
};

namespace detail {

// int_a^b r^{N-1} dr without cancellation for b - a << a
inline double radial_volume(double a, double b, int N) {
  if (a <= 0.0) return std::pow(b, N) / N;
  return std::pow(a, N) * std::expm1(N * std::log1p((b - a) / a)) / N;
}

}  // namespace detail

/// r = rc * expm1(xi), xi uniform: spacing ~ rc * dxi near 0 and ~ r * dxi far out.
inline std::vector<double> ball_mesh(double R, std::size_t n, double rc) {
  if (!(R > 0.0) || n < 2) throw std::invalid_argument("bad ball mesh");
  rc = std::min(rc, R);
  double xmax = std::log1p(R / rc);
  std::vector<double> r(n + 1);
  for (std::size_t i = 0; i <= n; ++i) r[i] = rc * std::expm1(xmax * static_cast<double>(i) / n);
  r[0] = 0.0;
  r[n] = R;
  return r;
}

inline std::vector<double> annulus_mesh(double R1, double R2, std::size_t n) {
  if (!(R1 > 0.0) || !(R2 > R1) || n < 2) throw std::invalid_argument("bad annulus mesh");
  std::vector<double> r(n + 1);
  double L = std::log(R2 / R1);
  for (std::size_t i = 0; i <= n; ++i) r[i] = R1 * std::exp(L * static_cast<double>(i) / n);
  r[0] = R1;
  r[n] = R2;
  return r;
}

/// Assembles the pencil for a potential given as a function of r.
inline LinearizedOperator build_operator(int N, const Domain& domain,
                                         const std::function<double(double)>& V,
                                         std::size_t resolution, double core_radius = 0.0) {
  if (N < 1) throw std::invalid_argument("dimension must be >= 1");
  if (resolution < 200) throw std::invalid_argument("resolution must be >= 200");
  LinearizedOperator L;
  L.dim = N;
  L.domain = domain;
  L.resolution = resolution;
  bool ball = std::holds_alternative<Ball>(domain);
  if (ball) {
    double R = std::get<Ball>(domain).R;
    double rc = core_radius;
    if (!(rc > 0.0)) {
      double vmax = 0.0;
      for (int k = 0; k <= 400; ++k) {
        double r = R * std::pow(1e-6, 1.0 - k / 400.0);
        vmax = std::max(vmax, std::abs(V(r)));
      }
      vmax = std::max(vmax, std::abs(V(0.0)));
      rc = vmax > 0.0 ? std::min(R, 0.25 / std::sqrt(vmax)) : R;
    }
    L.nodes = ball_mesh(R, resolution, rc);
  } else {
    auto a = std::get<Annulus>(domain);
    L.nodes = annulus_mesh(a.R1, a.R2, resolution);
  }
  const auto& x = L.nodes;
  const std::size_t n = x.size() - 1;
  std::vector<double> kel(n), mid(n);
  for (std::size_t e = 0; e < n; ++e) {
    double h = x[e + 1] - x[e];
    kel[e] = detail::radial_volume(x[e], x[e + 1], N) / (h * h);
    mid[e] = 0.5 * (x[e] + x[e + 1]);
  }
  std::size_t first = ball ? 0 : 1, last = n - 1;  // unknowns first..last inclusive
  const std::size_t m = last - first + 1;
  auto& P = L.pencil;
  P.diag.assign(m, 0.0);
  P.off.assign(m - 1, 0.0);
  P.weight.assign(m, 0.0);
  L.unknown_r.resize(m);
  L.potential.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t i = first + k;
    double lo = (i == 0) ? 0.0 : mid[i - 1];
    double hi = mid[i];
    double w = detail::radial_volume(lo, hi, N);
    double v = V(x[i]);
    double kk = kel[i] + (i > 0 ? kel[i - 1] : 0.0);
    P.weight[k] = w;
    P.diag[k] = kk - v * w;
    if (k + 1 < m) P.off[k] = -kel[i];
    L.unknown_r[k] = x[i];
    L.potential[k] = v;
  }
  P.check();
  return L;
}

/// Linearisation V = f'(u(r)) about a radial profile.
inline LinearizedOperator linearize(const RadialProfile& p, const Nonlinearity& f,
                                    const Domain& domain, std::size_t resolution) {
  double R = outer_radius(domain);
  if (R > p.r_max() * (1.0 + 1e-12))
    throw std::invalid_argument("domain radius " + std::to_string(R) + " exceeds the profile mesh");
  auto V = [&](double r) { return f.deriv1(p.u_at(std::min(r, p.r_max()))); };
  auto L = build_operator(p.dim(), domain, V, resolution);
  double sp = 0.0;
  const auto& r = p.r();
  for (std::size_t i = 1; i + 1 < r.size() && r[i] < R; ++i)
    sp = std::max(sp, (r[i + 1] - r[i]) / r[i]);
  L.profile_spacing = sp;
  return L;
}

/// Throws MeshTooCoarseError unless every element resolves the local wavelength
/// 2 pi / sqrt(V + lambda) of the eigenfunction with at least `points` nodes.
inline void check_resolution(const LinearizedOperator& L, double lambda, int points = 20) {
  const auto& x = L.nodes;
  const double limit = 2.0 * std::numbers::pi / points;
  for (std::size_t k = 0; k < L.unknown_r.size(); ++k) {
    double k2 = L.potential[k] + lambda;
    if (k2 <= 0.0) continue;
    auto it = std::lower_bound(x.begin(), x.end(), L.unknown_r[k]);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    double h = 0.0;
    if (i > 0) h = std::max(h, x[i] - x[i - 1]);
    if (i + 1 < x.size()) h = std::max(h, x[i + 1] - x[i]);
    if (h * std::sqrt(k2) > limit)
      throw MeshTooCoarseError("fewer than " + std::to_string(points) +
                               " points per local wavelength near r = " +
                               std::to_string(L.unknown_r[k]));
  }
}

inline double lambda1(const LinearizedOperator& L, double tol = 1e-10, bool check_mesh = true) {
  double l = L.pencil.eigenvalue(0, tol);
  if (check_mesh) check_resolution(L, l);
  return l;
}

inline std::size_t negative_count(const LinearizedOperator& L, double tol_spec = kDefaultTolSpec) {
  return L.pencil.count_below(-tol_spec);
}

struct SpectralReport {
  int dim = 3;
  std::string profile_id;
  std::vector<double> radii;
  std::vector<double> lambda1;
  std::vector<std::size_t> neg_count;
  std::size_t grid_resolution = 0;
  double tol_spec = kDefaultTolSpec;
  // smallest tested R0 with lambda1(Annulus(R0, R)) >= -tol_spec for every tested R > R0
  std::optional<double> stable_outside_radius;

  bool stable() const {
    return std::all_of(neg_count.begin(), neg_count.end(), [](std::size_t c) { return c == 0; });
  }
  std::size_t max_neg_count() const {
    return neg_count.empty() ? 0 : *std::max_element(neg_count.begin(), neg_count.end());
  }
};

struct MorseOptions {
  std::size_t resolution = 2048;
  double tol_spec = kDefaultTolSpec;
  bool find_stable_outside = true;
  int jobs = 1;
};

inline SpectralReport morse_index_radial(const RadialProfile& p, const Nonlinearity& f,
                                         std::vector<double> radii, const MorseOptions& o = {}) {
  if (radii.empty()) throw std::invalid_argument("no radii given");
  std::sort(radii.begin(), radii.end());
  SpectralReport rep;
  rep.dim = p.dim();
  rep.profile_id = p.id();
  rep.radii = radii;
  rep.grid_resolution = o.resolution;
  rep.tol_spec = o.tol_spec;
  rep.lambda1.resize(radii.size());
  rep.neg_count.resize(radii.size());
  parallel_for(radii.size(), o.jobs, [&](std::size_t i) {
    auto L = linearize(p, f, Ball{radii[i]}, o.resolution);
    rep.lambda1[i] = lambda1(L);
    rep.neg_count[i] = negative_count(L, o.tol_spec);
  });
  if (o.find_stable_outside) {
    const double Rmax = radii.back();
    std::vector<double> cand;
    for (int j = -8; std::pow(2.0, j / 2.0) <= Rmax / 2.0; ++j) cand.push_back(std::pow(2.0, j / 2.0));
    std::vector<char> ok(cand.size(), 0);
    parallel_for(cand.size(), o.jobs, [&](std::size_t c) {
      bool good = true;
      for (double R : radii) {
        if (R <= 2.0 * cand[c]) continue;
        auto L = linearize(p, f, Annulus{cand[c], R}, o.resolution);
        if (L.pencil.count_below(-o.tol_spec) > 0) {
          good = false;
          break;
        }
      }
      ok[c] = good;
    });
    for (std::size_t c = 0; c < cand.size(); ++c)
      if (ok[c]) {
        rep.stable_outside_radius = cand[c];
        break;
      }
  }
  return rep;
}

/// Spectral scan of the singular solution on annuli (it is singular at the origin).
inline SpectralReport singular_spectrum(const SingularSolution& s, const std::vector<Annulus>& annuli,
                                        std::size_t resolution = 4096,
                                        double tol_spec = kDefaultTolSpec, int jobs = 1) {
  SpectralReport rep;
  rep.dim = s.dim;
  rep.profile_id = "singular-" + s.spec.name();
  rep.grid_resolution = resolution;
  rep.tol_spec = tol_spec;
  rep.radii.resize(annuli.size());
  rep.lambda1.resize(annuli.size());
  rep.neg_count.resize(annuli.size());
  parallel_for(annuli.size(), jobs, [&](std::size_t i) {
    auto L = build_operator(s.dim, annuli[i], [&](double r) { return s.potential(r); }, resolution);
    rep.radii[i] = annuli[i].R2;
    rep.lambda1[i] = lambda1(L);
    rep.neg_count[i] = negative_count(L, tol_spec);
  });
  return rep;
}

/// g(p) = p m (N-2-m) - (N-2)^2/4 with m = 2/(p-1): the singular power solution is stable
/// (Hardy) iff g(p) <= 0. Returns nullopt (no threshold) for N <= 10.
inline double hardy_power_gap(int N, double p) {
  double m = 2.0 / (p - 1.0);
  return p * m * (N - 2.0 - m) - (N - 2.0) * (N - 2.0) / 4.0;
}

inline std::optional<double> hardy_power_threshold(int N, double tol = 1e-8) {
  if (N < 3) throw std::invalid_argument("hardy_power_threshold needs N >= 3");
  if (N <= 10) return std::nullopt;
  // g > 0 at the Sobolev exponent and g -> (N-2)(10-N)/4 < 0 as p -> infinity; below the
  // Sobolev exponent g has a second stable window near N/(N-2) that is not of interest here.
  double lo = (N + 2.0) / (N - 2.0), hi = 1e6;
  if (!(hardy_power_gap(N, lo) > 0.0 && hardy_power_gap(N, hi) < 0.0))
    throw NonConvergenceError("Hardy threshold not bracketed", 0.0);
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (hardy_power_gap(N, mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct ComparisonResult {
  bool below_everywhere = false;
  double worst_margin = 0.0;  // max over r > 0 of u(r) - u_s(r)
  std::optional<double> first_violation;
  std::size_t points = 0;
  // Heuristic: u <= u_s together with the Hardy stability of u_s suggests u is stable.
  bool supports_stability = false;
  std::string note = "heuristic comparison with the singular solution; not a proof";
};

inline ComparisonResult comparison_stability_test(const RadialProfile& p, const SingularSolution& s) {
  if (p.dim() != s.dim) throw std::invalid_argument("dimension mismatch between profile and u_s");
  ComparisonResult c;
  c.worst_margin = -std::numeric_limits<double>::infinity();
  const auto& r = p.r();
  const auto& u = p.u();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= 0.0) continue;
    double d = u[i] - s.value(r[i]);
    ++c.points;
    c.worst_margin = std::max(c.worst_margin, d);
    if (d > 0.0 && !c.first_violation) c.first_violation = r[i];
  }
  c.below_everywhere = !c.first_violation.has_value();
  const double n2 = s.dim - 2.0;
  bool singular_stable;
  if (s.spec.kind == EmdenKind::Exp) singular_stable = 2.0 * n2 <= n2 * n2 / 4.0;
  else singular_stable = hardy_power_gap(s.dim, s.spec.p) <= 0.0;
  c.supports_stability = c.below_everywhere && singular_stable;
  return c;
}

}  // namespace elliptica
