#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elliptica/asymptotics.hpp"
#include "elliptica/emden.hpp"
#include "elliptica/error.hpp"
#include "elliptica/nonlinearity.hpp"
#include "elliptica/parallel.hpp"
#include "elliptica/profile.hpp"
#include "elliptica/radial_solver.hpp"
#include "elliptica/stability.hpp"

namespace elliptica {

enum class CheckStatus { Pass, Fail, PartiallyChecked, EmptyCase };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "Pass";
    case CheckStatus::Fail: return "Fail";
    case CheckStatus::PartiallyChecked: return "PartiallyChecked";
    case CheckStatus::EmptyCase: return "EmptyCase";
  }
  return "?";
}

struct GalleryCheck {
  std::string property;  // the claim being checked
  CheckStatus status = CheckStatus::Fail;
  double value = std::numeric_limits<double>::quiet_NaN();
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

struct GalleryReport {
  std::string id;
  std::string label;  // which closed-form family
  int dim = 0;
  std::string nonlinearity;
  std::vector<GalleryCheck> checks;
  std::vector<std::string> flags;  // e.g. "stable", "not-bounded-below", "sign-changing-f"

  bool has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }
  const GalleryCheck* find(const std::string& property) const {
    for (auto& c : checks)
      if (c.property == property) return &c;
    return nullptr;
  }
  /// Fail if any check failed; EmptyCase when every check is empty; otherwise PartiallyChecked
  /// if any claim could only be checked in part.
  CheckStatus overall() const {
    bool partial = false, all_empty = !checks.empty();
    for (auto& c : checks) {
      if (c.status == CheckStatus::Fail) return CheckStatus::Fail;
      if (c.status == CheckStatus::PartiallyChecked) partial = true;
      if (c.status != CheckStatus::EmptyCase) all_empty = false;
    }
    if (all_empty) return CheckStatus::EmptyCase;
    return partial ? CheckStatus::PartiallyChecked : CheckStatus::Pass;
  }
};

struct GalleryEntry {
  std::string id;
  std::string label;
  std::string summary;
  int default_dim = 3;
  int min_dim = 1;
};

inline std::vector<GalleryEntry> list_entries() {
  return {
      {"paraboloid", "bounded-above", "u = -|x|^2 with f = 2N: stable, bounded above but not below", 3, 1},
      {"tanh", "one-dimensional-front", "u = tanh(x1/sqrt2) with f = u - u^3: monotone hence stable, nonconstant, f changes sign", 1, 1},
      {"bubble", "standard-bubble", "u = (1 + |x|^2/(N(N-2)))^{-(N-2)/2} with f = u^{(N+2)/(N-2)}: Morse index 1, stable outside a compact set", 3, 3},
      {"singular-exp", "singular-logarithm", "u_s = ln(2(N-2)) - 2 ln|x| with f = e^u: stable iff N >= 10", 10, 3},
      {"liouville-2d", "liouville-plane", "u = ln(8/(1+|x|^2)^2) with f = e^u in the plane: stable outside a compact set, unbounded below with logarithmic rate", 2, 2},
      {"truncated-power", "finite-morse-family", "f = [(u - beta)^+]^p: bounded radial solutions with finite Morse index", 3, 3},
      {"constant", "constant-at-zero", "u = z at a zero z of f: stable iff f'(z) <= 0", 3, 1},
      {"halfspace-kpp", "half-line-profile", "monotone profile of -u'' = u(1-u) on the half line, u(0) = 0, u -> 1", 1, 1},
  };
}

inline std::optional<GalleryEntry> find_entry(const std::string& id) {
  for (auto& e : list_entries())
    if (e.id == id) return e;
  return std::nullopt;
}

struct GalleryOptions {
  int dim = 0;  // 0: entry default
  std::size_t resolution = 2048;
  double residual_tol = 1e-8;
  /// nonlinearity used by the "constant" entry
  std::string constant_nonlinearity = "allen-cahn";
  int jobs = 1;
};

namespace detail {

inline GalleryCheck check(std::string property, bool ok, double value, double threshold,
                          std::string detail = {}) {
  return {std::move(property), ok ? CheckStatus::Pass : CheckStatus::Fail, value, threshold, std::move(detail)};
}

inline GalleryCheck residual_check(const RadialProfile& p, const Nonlinearity& f, double tol) {
  // absolute: closed forms are O(1) and the far tails of tanh-like fronts lose all relative digits in f
  auto rep = validate_profile(p, f, tol);
  return check("residual", rep.passed, rep.max_abs, tol, "finite-difference residual");
}

inline double min_lambda1_on_balls(const RadialProfile& p, const Nonlinearity& f,
                                   const std::vector<double>& radii, std::size_t res, std::size_t* negs) {
  double lmin = std::numeric_limits<double>::infinity();
  *negs = 0;
  for (double R : radii) {
    auto L = linearize(p, f, Ball{R}, res);
    lmin = std::min(lmin, lambda1(L));
    *negs = std::max(*negs, negative_count(L));
  }
  return lmin;
}

inline GalleryReport verify_paraboloid(int N, const GalleryOptions& o) {
  GalleryReport rep;
  auto f = make_constant(2.0 * N);
  rep.nonlinearity = f.name;
  auto p = sample_profile(N, graded_mesh(64.0, 1e-2, 1.02, 20, 0.05), [](double r) { return -r * r; },
                          [](double r) { return -2.0 * r; }, [](double) { return -2.0; }, "paraboloid");
  rep.checks.push_back(residual_check(p, f, o.residual_tol));
  std::size_t negs = 0;
  double l1 = min_lambda1_on_balls(p, f, {4.0, 16.0, 64.0}, o.resolution, &negs);
  rep.checks.push_back(check("stable", negs == 0 && l1 > 0.0, l1, 0.0,
                             "f' = 0, lambda1 is the Dirichlet eigenvalue of the ball"));
  // bounded above by u(0), unbounded below: no finite limit at infinity
  bool no_limit = false;
  try {
    normalize_to_zero_limit(p);
  } catch (const NoFiniteLimitError&) {
    no_limit = true;
  }
  rep.checks.push_back(check("bounded-above", *std::max_element(p.u().begin(), p.u().end()) <= p.center_value(),
                             p.center_value(), 0.0));
  rep.checks.push_back(check("not-bounded-below", no_limit && p.u().back() < -1e3, p.u().back(), -1e3,
                             "u(64) = -4096, no finite limit"));
  rep.flags = {"stable", "bounded-above"};
  if (no_limit) rep.flags.push_back("not-bounded-below");
  return rep;
}

inline GalleryReport verify_tanh(const GalleryOptions& o) {
  GalleryReport rep;
  auto f = make_allen_cahn();
  rep.nonlinearity = f.name;
  const double s = std::sqrt(0.5);
  auto p = sample_profile(
      1, graded_mesh(20.0, 2e-3, 1.01, 20, 0.01), [s](double x) { return std::tanh(s * x); },
      [s](double x) { return s / (std::cosh(s * x) * std::cosh(s * x)); },
      [s](double x) {
        double t = std::tanh(s * x);
        return -2.0 * s * s * t * (1.0 - t * t);
      },
      "tanh");
  rep.checks.push_back(residual_check(p, f, o.residual_tol));
  bool monotone = std::all_of(p.du().begin(), p.du().end(), [](double d) { return d > 0.0; });
  rep.checks.push_back(check("monotone", monotone, *std::min_element(p.du().begin(), p.du().end()), 0.0));
  // the even sector on [-R, R] holds the positive kernel u' of the line operator, so lambda1
  // sits at 0+ and the discrete value may dip by the discretisation error
  std::size_t negs = 0;
  double l1 = min_lambda1_on_balls(p, f, {5.0, 10.0, 20.0}, o.resolution, &negs);
  const double zero_mode_tol = 1e-5;
  bool stable = l1 >= -zero_mode_tol;
  rep.checks.push_back({"stable", stable ? CheckStatus::PartiallyChecked : CheckStatus::Fail, l1,
                        -zero_mode_tol, "even sector on symmetric intervals; odd modes not tested"});
  bool sign_changing = f.sign_class.kind == SignKind::SignChanging;
  rep.checks.push_back(check("sign-changing-f", sign_changing, 0.0, 0.0, to_string(f.sign_class.kind)));
  double spread = p.u().back() - p.u().front();
  rep.checks.push_back(check("nonconstant", spread > 0.5, spread, 0.5));
  if (stable) rep.flags.push_back("stable");
  if (monotone) rep.flags.push_back("monotone");
  if (sign_changing) rep.flags.push_back("sign-changing-f");
  return rep;
}

inline RadialProfile bubble_profile(int N, double r_max = 1e4) {
  const double c = 1.0 / (N * (N - 2.0)), e = -(N - 2.0) / 2.0;
  return sample_profile(
      N, graded_mesh(r_max, 1e-3, 1.02, 20), [=](double r) { return std::pow(1.0 + c * r * r, e); },
      [=](double r) { return e * std::pow(1.0 + c * r * r, e - 1.0) * 2.0 * c * r; },
      [=](double r) {
        double q = 1.0 + c * r * r;
        return 2.0 * c * e * (std::pow(q, e - 1.0) + 2.0 * c * r * r * (e - 1.0) * std::pow(q, e - 2.0));
      },
      "bubble-N" + std::to_string(N));
}

inline GalleryReport verify_bubble(int N, const GalleryOptions& o) {
  GalleryReport rep;
  auto f = make_power((N + 2.0) / (N - 2.0));
  rep.nonlinearity = f.name;
  auto p = bubble_profile(N);
  rep.checks.push_back(residual_check(p, f, o.residual_tol));
  MorseOptions mo;
  mo.resolution = o.resolution;
  mo.jobs = o.jobs;
  auto sp = morse_index_radial(p, f, {20.0, 100.0, 1000.0}, mo);
  bool one = std::all_of(sp.neg_count.begin(), sp.neg_count.end(), [](std::size_t c) { return c == 1; });
  rep.checks.push_back({"morse-index-1", one ? CheckStatus::PartiallyChecked : CheckStatus::Fail,
                        static_cast<double>(sp.max_neg_count()), 1.0,
                        "radial sector only; nonradial modes are not counted"});
  rep.checks.push_back(check("stable-outside-compact", sp.stable_outside_radius.has_value(),
                             sp.stable_outside_radius.value_or(std::numeric_limits<double>::quiet_NaN()), 0.0));
  DecayOptions d;
  auto fit = fit_sup_decay(p, d);
  rep.checks.push_back(check("sup-decay", fit.verdict == Verdict::Holds, fit.exponent, fit.bound + fit.slack));
  auto grad = fit_gradient_tail(p, d);
  rep.checks.push_back(check("gradient-decay", grad.verdict == Verdict::Holds, grad.exponent, grad.bound + grad.slack));
  rep.flags = {"finite-morse-index"};
  if (sp.stable_outside_radius) rep.flags.push_back("stable-outside-compact");
  return rep;
}

inline GalleryReport verify_singular_exp(int N, const GalleryOptions& o) {
  GalleryReport rep;
  rep.nonlinearity = "exp";
  auto s = singular_solution(EmdenSpec::exp(), N);
  auto cert = certify_singular(s);
  rep.checks.push_back(check("residual", cert.passed, cert.max_rel, cert.tol, "relative, r in [1e-3, 1e3]"));
  auto sp = singular_spectrum(s, {Annulus{0.1, 10.0}}, std::max<std::size_t>(o.resolution, 4096));
  double l1 = sp.lambda1.front();
  bool expect_stable = N >= 10;
  bool stable = l1 >= -1e-4;
  rep.checks.push_back(check(expect_stable ? "stable" : "unstable", stable == expect_stable, l1, -1e-4,
                             "lambda1 on Annulus(0.1, 10)"));
  rep.flags.push_back(stable ? "stable" : "unstable");
  rep.flags.push_back("not-bounded-below");
  return rep;
}

inline GalleryReport verify_liouville(const GalleryOptions& o) {
  GalleryReport rep;
  auto f = make_exp();
  rep.nonlinearity = f.name;
  auto p = sample_profile(
      2, graded_mesh(1e4, 1e-3, 1.02, 20),
      [](double r) { return std::log(8.0) - 2.0 * std::log1p(r * r); },
      [](double r) { return -4.0 * r / (1.0 + r * r); },
      [](double r) { return -4.0 * (1.0 - r * r) / ((1.0 + r * r) * (1.0 + r * r)); }, "liouville-2d");
  rep.checks.push_back(residual_check(p, f, o.residual_tol));
  MorseOptions mo;
  mo.resolution = o.resolution;
  mo.jobs = o.jobs;
  auto sp = morse_index_radial(p, f, {10.0, 100.0, 1000.0}, mo);
  rep.checks.push_back(check("stable-outside-compact", sp.stable_outside_radius.has_value(),
                             sp.stable_outside_radius.value_or(std::numeric_limits<double>::quiet_NaN()), 0.0,
                             "radial sector"));
  // unbounded below, at a logarithmic rate
  double slope = (p.u().back() - p.u_at(p.r_max() / 2.0)) / std::log(2.0);
  bool no_limit = false;
  try {
    normalize_to_zero_limit(p);
  } catch (const NoFiniteLimitError&) {
    no_limit = true;
  }
  rep.checks.push_back(check("not-bounded-below", no_limit, slope, 0.0, "tail slope against ln r"));
  rep.checks.push_back(check("logarithmic-lower-bound", std::abs(slope + 4.0) < 1e-3, slope, -4.0,
                             "u + 4 ln r stays bounded"));
  rep.flags = {"not-bounded-below"};
  if (sp.stable_outside_radius) rep.flags.push_back("stable-outside-compact");
  return rep;
}

inline GalleryReport verify_truncated(int N, const GalleryOptions& o) {
  GalleryReport rep;
  auto f = make_truncated(2.0, 1.0);
  rep.nonlinearity = f.name;
  ShootingParams sp;
  sp.dim = N;
  sp.center_value = 2.0;
  sp.r_max = 1e3;
  auto p = shoot(f, sp);
  rep.checks.push_back(residual_check(p, f, o.residual_tol));
  // crossing u = beta is expected; boundedness is read off the tail
  auto tail = estimate_tail_limit(p);
  rep.checks.push_back(check("bounded", tail.settled || tail.geometric, tail.limit, 0.0, "finite limit at infinity"));
  MorseOptions mo;
  mo.resolution = o.resolution;
  mo.jobs = o.jobs;
  mo.find_stable_outside = true;
  auto spec = morse_index_radial(p, f, {10.0, 100.0, 1000.0}, mo);
  bool flat = std::all_of(spec.neg_count.begin(), spec.neg_count.end(),
                          [&](std::size_t c) { return c == spec.neg_count.back(); });
  rep.checks.push_back({"finite-morse-index", flat ? CheckStatus::PartiallyChecked : CheckStatus::Fail,
                        static_cast<double>(spec.max_neg_count()), 0.0,
                        "radial-sector count constant in R"});
  rep.flags = {"finite-morse-index"};
  return rep;
}

inline GalleryReport verify_constant(int N, const GalleryOptions& o) {
  GalleryReport rep;
  auto f = parse_nonlinearity(o.constant_nonlinearity);
  rep.nonlinearity = f.name;
  if (f.zeros.empty()) {
    rep.checks.push_back({"constant-solution", CheckStatus::EmptyCase, 0.0, 0.0,
                          "f has no zero, so no constant solution exists"});
    return rep;
  }
  for (double z : f.zeros) {
    auto p = sample_profile(N, graded_mesh(50.0, 1e-2, 1.05, 20, 0.5), [z](double) { return z; },
                            [](double) { return 0.0; }, [](double) { return 0.0; });
    std::string tag = "z=" + std::to_string(z);
    rep.checks.push_back(check("residual " + tag, std::abs(f.eval(z)) <= 1e-12, std::abs(f.eval(z)), 1e-12));
    // on B_R, lambda1 = mu1/R^2 - f'(z): its sign for large R is the sign of -f'(z)
    auto L = linearize(p, f, Ball{50.0}, o.resolution);
    double l1 = lambda1(L, 1e-10, false);
    bool predicted = f.deriv1(z) <= 0.0;
    bool measured = l1 >= -1e-6;
    rep.checks.push_back(check((predicted ? "stable " : "unstable ") + tag, predicted == measured, l1, -1e-6));
  }
  return rep;
}

inline GalleryReport verify_halfspace(const GalleryOptions& o) {
  GalleryReport rep;
  auto f = make_logistic();
  rep.nonlinearity = f.name;
  auto p = halfspace_profile_1d(f, 1.0, 30.0);
  rep.checks.push_back(residual_check(p, f, o.residual_tol));
  bool monotone = std::all_of(p.du().begin(), p.du().end(), [](double d) { return d >= 0.0; });
  rep.checks.push_back(check("monotone", monotone, *std::min_element(p.du().begin(), p.du().end()), 0.0));
  rep.checks.push_back(check("limit", std::abs(p.u().back() - 1.0) < 1e-6, p.u().back(), 1.0));
  rep.flags = {"monotone"};
  return rep;
}

}  // namespace detail

/// Runs the checkable claims of one gallery entry.
inline GalleryReport verify_entry(const std::string& id, const GalleryOptions& o = {}) {
  auto e = find_entry(id);
  if (!e) throw std::invalid_argument("unknown gallery entry '" + id + "'");
  int N = o.dim > 0 ? o.dim : e->default_dim;
  if (N < e->min_dim)
    throw std::invalid_argument("gallery entry '" + id + "' needs dim >= " + std::to_string(e->min_dim));
  GalleryReport rep;
  if (id == "paraboloid") rep = detail::verify_paraboloid(N, o);
  else if (id == "tanh") rep = detail::verify_tanh(o), N = 1;
  else if (id == "bubble") rep = detail::verify_bubble(N, o);
  else if (id == "singular-exp") rep = detail::verify_singular_exp(N, o);
  else if (id == "liouville-2d") rep = detail::verify_liouville(o), N = 2;
  else if (id == "truncated-power") rep = detail::verify_truncated(N, o);
  else if (id == "constant") rep = detail::verify_constant(N, o);
  else rep = detail::verify_halfspace(o), N = 1;
  rep.id = id;
  rep.label = e->label;
  rep.dim = N;
  return rep;
}

inline std::vector<GalleryReport> verify_all(const GalleryOptions& o = {}) {
  auto entries = list_entries();
  std::vector<GalleryReport> out(entries.size());
  parallel_for(entries.size(), o.jobs, [&](std::size_t i) { out[i] = verify_entry(entries[i].id, o); });
  return out;
}

}  // namespace elliptica
