#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "elliptica/error.hpp"

namespace elliptica {

using State2 = std::array<double, 2>;
using Rhs2 = std::function<void(const State2&, State2&, double)>;

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  long max_steps = 2'000'000;
  double blowup_guard = 1e8;  // on |y[0]|
  double h_init = 0.0;        // 0: a fraction of the first node interval
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

namespace detail {

using Dopri = boost::numeric::odeint::runge_kutta_dopri5<State2>;
using ControlledDopri = boost::numeric::odeint::controlled_runge_kutta<Dopri>;

inline ControlledDopri make_dopri(const OdeOptions& o) {
  return boost::numeric::odeint::make_controlled(o.abs_tol, o.rel_tol, Dopri());
}

inline bool escaped(const State2& y, double guard) {
  return !std::isfinite(y[0]) || !std::isfinite(y[1]) || std::abs(y[0]) > guard;
}

// Advances y from t to t_end exactly. Returns false (leaving y, t at the last good state)
// when the guard trips; `last_dt` then holds the offending step.
inline bool advance(ControlledDopri& st, const Rhs2& rhs, State2& y, double& t, double t_end,
                    double& dt, const OdeOptions& o, OdeStats& stats, double& last_dt) {
  namespace ode = boost::numeric::odeint;
  while (t < t_end) {
    double remaining = t_end - t;
    bool clipped = dt >= remaining;
    double h = clipped ? remaining : dt;
    double h_min = 1e-14 * std::max(1.0, std::abs(t));
    State2 trial = y;
    double tt = t;
    ode::controlled_step_result res = ode::fail;
    int reductions = 0;
    while (true) {
      try {
        res = st.try_step(rhs, trial, tt, h);
      } catch (const ode::step_adjustment_error&) {
        throw StepFailureError(t);
      }
      if (res == ode::success) break;
      ++stats.rejected;
      if (h < h_min || ++reductions > 200) throw StepFailureError(t);
      trial = y;
      tt = t;
    }
    if (escaped(trial, o.blowup_guard)) {
      last_dt = tt - t;
      return false;
    }
    if (++stats.accepted > o.max_steps) throw StepFailureError(t, "step budget exhausted");
    y = trial;
    // a clipped step that went through unreduced lands exactly on the node
    bool landed = clipped && reductions == 0;
    t = landed ? t_end : tt;
    if (!landed || h > dt) dt = h;
  }
  return true;
}

}  // namespace detail

/// Integrates y' = rhs(y, t) from (t0, y0) through increasing nodes, reporting the state at
/// each node. Dormand-Prince 5(4) with error control; steps are clipped to land on nodes.
/// Throws BlowUpError with the guard-crossing radius localised by bisection to 1e-6 relative.
inline OdeStats integrate_to_nodes(const Rhs2& rhs, double t0, State2 y0,
                                   const std::vector<double>& nodes,
                                   const std::function<void(std::size_t, const State2&)>& out,
                                   const OdeOptions& o = {}) {
  OdeStats stats;
  auto st = detail::make_dopri(o);
  State2 y = y0;
  double t = t0;
  double dt = o.h_init > 0.0 ? o.h_init
                             : (nodes.empty() ? 1e-3 : 0.1 * std::max(nodes.front() - t0, 1e-12));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double last_dt = 0.0;
    if (!detail::advance(st, rhs, y, t, nodes[i], dt, o, stats, last_dt)) {
      // bisection: lo is reachable below the guard, hi is not
      double lo = t, hi = t + last_dt;
      State2 ylo = y;
      while (hi - lo > 1e-6 * hi) {
        double mid = 0.5 * (lo + hi);
        auto st2 = detail::make_dopri(o);
        State2 ym = ylo;
        double tm = lo, dtm = 0.25 * (mid - lo), ld = 0.0;
        OdeStats scratch;
        bool ok = false;
        try {
          ok = detail::advance(st2, rhs, ym, tm, mid, dtm, o, scratch, ld);
        } catch (const StepFailureError&) {
          ok = false;
        }
        if (ok) {
          lo = mid;
          ylo = ym;
        } else {
          hi = mid;
        }
      }
      throw BlowUpError(hi, ylo[0]);
    }
    out(i, y);
  }
  return stats;
}

}  // namespace elliptica
