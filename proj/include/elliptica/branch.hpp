#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elliptica/error.hpp"
#include "elliptica/nonlinearity.hpp"
#include "elliptica/parallel.hpp"
#include "elliptica/radial_solver.hpp"
#include "elliptica/stability.hpp"

namespace elliptica {

struct BranchOptions {
  int samples = 64;
  /// log spacing in a (needs a_lo > 0); linear spacing otherwise. For Exp a shift in a is a
  /// dilation of r, so linear spacing in a is logarithmic in the length scale.
  bool log_spacing = true;
  int refine_levels = 2;  // trisection passes near classification changes
  double r_max = 1e3;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::vector<double> morse_radii{10.0, 100.0, 1000.0};
  std::size_t resolution = 2048;
  double tol_spec = kDefaultTolSpec;
  bool keep_profiles = false;
  int jobs = 0;
};

struct BranchEntry {
  double a = 0.0;
  ShotClass cls = ShotClass::Failed;
  bool bounded = false;  // bounded with a finite limit at infinity
  double limit = std::numeric_limits<double>::quiet_NaN();
  double inf_estimate = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> blowup_radius;
  std::vector<std::size_t> neg_count;  // per morse radius, empty when not annotated
  std::vector<double> lambda1;
  bool stable = false;  // neg_count == 0 on every tested ball
  std::string detail;
  std::optional<RadialProfile> profile;

  /// The combination forbidden by the Liouville theorem in low dimension.
  bool bounded_and_stable() const { return bounded && stable; }
};

struct BranchResult {
  int dim = 0;
  std::string nonlinearity;
  double a_lo = 0.0, a_hi = 0.0;
  std::vector<double> morse_radii;
  std::vector<BranchEntry> entries;  // sorted by a

  std::size_t count(ShotClass c) const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [c](const BranchEntry& e) { return e.cls == c; }));
  }
  std::size_t bounded_stable_count() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const BranchEntry& e) { return e.bounded_and_stable(); }));
  }
};

namespace detail {

inline BranchEntry branch_sample(const Nonlinearity& f, int N, double a, const BranchOptions& o) {
  BranchEntry e;
  e.a = a;
  ShootingParams sp;
  sp.dim = N;
  sp.center_value = a;
  sp.r_max = o.r_max;
  sp.rel_tol = o.rel_tol;
  sp.abs_tol = o.abs_tol;
  try {
    auto p = shoot(f, sp);
    auto c = classify_shot(p, f);
    e.cls = c.cls;
    e.detail = c.detail;
    e.inf_estimate = p.inf_estimate();
    e.bounded = c.cls == ShotClass::Bounded;
    if (e.bounded) e.limit = c.tail.settled && !c.tail.geometric ? p.u().back() : c.tail.limit;
    std::vector<double> radii;
    for (double R : o.morse_radii)
      if (R <= p.r_max() * (1.0 + 1e-12)) radii.push_back(R);
    if (!radii.empty()) {
      MorseOptions mo;
      mo.resolution = o.resolution;
      mo.tol_spec = o.tol_spec;
      mo.find_stable_outside = false;
      mo.jobs = 1;
      auto rep = morse_index_radial(p, f, radii, mo);
      e.neg_count = rep.neg_count;
      e.lambda1 = rep.lambda1;
      e.stable = rep.stable();
    }
    if (o.keep_profiles) e.profile = std::move(p);
  } catch (const BlowUpError& err) {
    e.cls = ShotClass::BlowUp;
    e.blowup_radius = err.radius();
    e.detail = err.what();
  } catch (const std::exception& err) {
    e.cls = ShotClass::Failed;
    e.detail = err.what();
  }
  return e;
}

}  // namespace detail

/// Sweeps the centre value over [a_lo, a_hi], classifies each shot and annotates it with the
/// radial Morse counts on the tested balls. Per-sample failures are recorded, not thrown.
inline BranchResult find_bounded_stable_branch(const Nonlinearity& f, int N, double a_lo, double a_hi,
                                               const BranchOptions& o = {}) {
  if (N < 3) throw std::invalid_argument("branch sweep needs N >= 3");
  if (!(a_hi > a_lo)) throw std::invalid_argument("empty centre-value range");
  if (o.samples < 2) throw std::invalid_argument("branch sweep needs at least two samples");
  if (o.log_spacing && !(a_lo > 0.0)) throw std::invalid_argument("log spacing needs a_lo > 0");
  BranchResult res;
  res.dim = N;
  res.nonlinearity = f.name;
  res.a_lo = a_lo;
  res.a_hi = a_hi;
  res.morse_radii = o.morse_radii;

  std::vector<double> as(static_cast<std::size_t>(o.samples));
  for (int i = 0; i < o.samples; ++i) {
    double t = static_cast<double>(i) / (o.samples - 1);
    as[i] = o.log_spacing ? a_lo * std::pow(a_hi / a_lo, t) : a_lo + (a_hi - a_lo) * t;
  }
  auto run = [&](const std::vector<double>& pts) {
    std::vector<BranchEntry> out(pts.size());
    parallel_for(pts.size(), o.jobs, [&](std::size_t i) { out[i] = detail::branch_sample(f, N, pts[i], o); });
    return out;
  };
  res.entries = run(as);

  auto key = [](const BranchEntry& e) { return std::make_pair(static_cast<int>(e.cls), e.stable); };
  for (int level = 0; level < o.refine_levels; ++level) {
    std::vector<double> extra;
    for (std::size_t i = 1; i < res.entries.size(); ++i) {
      const auto& l = res.entries[i - 1];
      const auto& r = res.entries[i];
      if (key(l) == key(r)) continue;
      if (o.log_spacing) {
        double q = std::cbrt(r.a / l.a);
        extra.push_back(l.a * q);
        extra.push_back(l.a * q * q);
      } else {
        extra.push_back(l.a + (r.a - l.a) / 3.0);
        extra.push_back(l.a + 2.0 * (r.a - l.a) / 3.0);
      }
    }
    if (extra.empty()) break;
    auto more = run(extra);
    for (auto& e : more) res.entries.push_back(std::move(e));
    std::sort(res.entries.begin(), res.entries.end(), [](const BranchEntry& x, const BranchEntry& y) { return x.a < y.a; });
  }
  return res;
}

}  // namespace elliptica
