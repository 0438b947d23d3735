#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elliptica/error.hpp"
#include "elliptica/grid2d.hpp"
#include "elliptica/nonlinearity.hpp"
#include "elliptica/parallel.hpp"

namespace elliptica {

/// Maximum of a grid function sits more than one cell away from the sweep origin.
class UncenteredInputError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
  const char* kind() const noexcept override { return "UncenteredInput"; }
};

/// Grid values extended a few cells past the domain by quadratic extrapolation along
/// grid lines and diagonals, so that bicubic stencils near the boundary are complete.
class GridInterpolator {
 public:
  explicit GridInterpolator(const GridSolution2D& g, int layers = 3) : g_(g), ext_(g.u), ok_(g.inside) {
    static const int dirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
    for (int layer = 0; layer < layers; ++layer) {
      std::vector<double> val = ext_;
      std::vector<char> ok = ok_;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          auto k = g.idx(i, j);
          if (ok_[k]) continue;
          double sum = 0.0;
          int cnt = 0;
          for (auto& d : dirs) {
            int i1 = i + d[0], j1 = j + d[1], i3 = i + 3 * d[0], j3 = j + 3 * d[1];
            if (!valid(i1, j1) || !valid(i3, j3) || !valid(i + 2 * d[0], j + 2 * d[1])) continue;
            sum += 3.0 * ext_[g.idx(i1, j1)] - 3.0 * ext_[g.idx(i + 2 * d[0], j + 2 * d[1])] +
                   ext_[g.idx(i3, j3)];
            ++cnt;
          }
          if (cnt > 0) {
            val[k] = sum / cnt;
            ok[k] = 1;
          }
        }
      ext_.swap(val);
      ok_.swap(ok);
    }
  }

  /// Keys cubic convolution (a = -1/2); bilinear where the 4x4 stencil is incomplete.
  double operator()(double px, double py) const {
    double sx = (px - g_.x0) / g_.h, sy = (py - g_.y0) / g_.h;
    int i = static_cast<int>(std::floor(sx)), j = static_cast<int>(std::floor(sy));
    double tx = sx - i, ty = sy - j;
    // snap round-off so that node hits are exact
    if (tx < 1e-12) tx = 0.0;
    if (ty < 1e-12) ty = 0.0;
    if (tx > 1.0 - 1e-12) { ++i; tx = 0.0; }
    if (ty > 1.0 - 1e-12) { ++j; ty = 0.0; }
    if (tx == 0.0 && ty == 0.0 && valid(i, j)) return ext_[g_.idx(i, j)];
    bool full = true;
    for (int b = -1; b <= 2 && full; ++b)
      for (int a = -1; a <= 2 && full; ++a) full = valid(i + a, j + b);
    if (full) {
      double wx[4], wy[4];
      keys(tx, wx);
      keys(ty, wy);
      double s = 0.0;
      for (int b = 0; b < 4; ++b) {
        double row = 0.0;
        for (int a = 0; a < 4; ++a) row += wx[a] * ext_[g_.idx(i - 1 + a, j - 1 + b)];
        s += wy[b] * row;
      }
      return s;
    }
    if (valid(i, j) && valid(i + 1, j) && valid(i, j + 1) && valid(i + 1, j + 1)) {
      return (1 - tx) * (1 - ty) * ext_[g_.idx(i, j)] + tx * (1 - ty) * ext_[g_.idx(i + 1, j)] +
             (1 - tx) * ty * ext_[g_.idx(i, j + 1)] + tx * ty * ext_[g_.idx(i + 1, j + 1)];
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

 private:
  bool valid(int i, int j) const {
    return i >= 0 && j >= 0 && i < g_.nx && j < g_.ny && ok_[g_.idx(i, j)];
  }
  static void keys(double t, double w[4]) {
    const double a = -0.5;
    auto k = [a](double s) {
      s = std::abs(s);
      if (s <= 1.0) return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0;
      if (s < 2.0) return ((a * s - 5.0 * a) * s + 8.0 * a) * s - 4.0 * a;
      return 0.0;
    };
    w[0] = k(1.0 + t);
    w[1] = k(t);
    w[2] = k(1.0 - t);
    w[3] = k(2.0 - t);
  }

  const GridSolution2D& g_;
  std::vector<double> ext_;
  std::vector<char> ok_;
};

struct GridMaximum {
  int i = 0, j = 0;
  double value = 0.0;
  double x = 0.0, y = 0.0;  // quadratic-fit location
};

inline GridMaximum locate_maximum(const GridSolution2D& g) {
  GridMaximum m;
  m.value = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.inside[g.idx(i, j)] && g.at(i, j) > m.value) {
        m.value = g.at(i, j);
        m.i = i;
        m.j = j;
      }
  if (!std::isfinite(m.value)) throw std::invalid_argument("grid has no inside nodes");
  auto fit = [&](int di, int dj) {
    int ia = m.i - di, ja = m.j - dj, ib = m.i + di, jb = m.j + dj;
    if (!g.is_inside(ia, ja) || !g.is_inside(ib, jb)) return 0.0;
    double um = g.at(ia, ja), up = g.at(ib, jb);
    double curv = up - 2.0 * m.value + um;
    if (!(curv < 0.0)) return 0.0;
    return std::clamp(-0.5 * g.h * (up - um) / curv, -g.h, g.h);
  };
  m.x = g.x(m.i) + fit(1, 0);
  m.y = g.y(m.j) + fit(0, 1);
  return m;
}

/// Translate the data so that its fitted maximum sits at the origin node. The domain moves
/// with the data; nodes whose preimage leaves the domain drop out.
inline GridSolution2D recenter(const GridSolution2D& g) {
  auto m = locate_maximum(g);
  GridInterpolator interp(g);
  GridSolution2D out = g;
  out.cx = g.cx - m.x;
  out.cy = g.cy - m.y;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      auto k = g.idx(i, j);
      double px = g.x(i) + m.x, py = g.y(j) + m.y;
      bool in = g.contains(px, py, -1e-12);
      double v = in ? interp(px, py) : 0.0;
      out.inside[k] = in && std::isfinite(v) ? 1 : 0;
      out.u[k] = out.inside[k] ? v : 0.0;
    }
  out.residual_norm = std::numeric_limits<double>::quiet_NaN();
  out.id = g.id + "-centred";
  return out;
}

/// Node index nearest the origin.
inline std::pair<int, int> origin_node(const GridSolution2D& g) {
  return {static_cast<int>(std::lround(-g.x0 / g.h)), static_cast<int>(std::lround(-g.y0 / g.h))};
}

struct MovingPlaneState {
  double lambda = 0.0;
  std::vector<double> w_lambda;  // u_lambda - u at the nodes of `points`, only when kept
  std::vector<std::size_t> points;
  std::size_t count = 0;
  double min_w = std::numeric_limits<double>::infinity();
  double a_lambda_norm = std::numeric_limits<double>::quiet_NaN();
  double lambda0 = 0.0;
};

struct MovingPlaneOptions {
  int steps = 64;
  /// min_w tolerance; <= 0 means h^2
  double tol = 0.0;
  const Nonlinearity* f = nullptr;  // needed for a_lambda
  bool keep_w = false;
  int dim = 2;  // L^{N/2} exponent of the a_lambda norm
};

struct MovingPlaneResult {
  double axis_angle = 0.0;
  double ex = 1.0, ey = 0.0;
  double lambda0 = 0.0;
  double lambda_start = 0.0;
  double tol = 0.0;
  bool violated = false;
  std::vector<MovingPlaneState> certificate;
  bool reaches_origin() const { return lambda0 >= -tol; }
};

/// a_lambda = (f(u_lambda) - f(u)) / (u_lambda - u) where u > u_lambda, zero elsewhere.
/// Differences at round-off level count as ties.
inline double a_lambda_coefficient(const Nonlinearity& f, double u, double ul) {
  if (!(u - ul > 1e-12 * (1.0 + std::abs(u)))) return 0.0;
  double d = ul - u;
  if (std::abs(d) < 1e-10 * (1.0 + std::abs(u))) return f.deriv1(0.5 * (u + ul));
  return (f.eval(ul) - f.eval(u)) / d;
}

/// Planes {x.e = lambda} swept from the far edge (lambda < 0) to the origin; w_lambda
/// compares the reflected values with u on Sigma_lambda = {x.e < lambda}.
inline MovingPlaneResult moving_plane_sweep(const GridSolution2D& g, double ex, double ey,
                                            const MovingPlaneOptions& opts = {}) {
  double nrm = std::hypot(ex, ey);
  if (!(nrm > 0.0)) throw std::invalid_argument("axis must be a nonzero direction");
  ex /= nrm;
  ey /= nrm;
  if (opts.steps < 1) throw std::invalid_argument("steps must be positive");
  auto m = locate_maximum(g);
  auto [i0, j0] = origin_node(g);
  if (std::abs(m.i - i0) > 1 || std::abs(m.j - j0) > 1)
    throw UncenteredInputError("maximum at (" + std::to_string(g.x(m.i)) + ", " + std::to_string(g.y(m.j)) +
                               ") is more than one cell from the sweep origin; recenter first");

  MovingPlaneResult res;
  res.ex = ex;
  res.ey = ey;
  res.axis_angle = std::atan2(ey, ex);
  res.tol = opts.tol > 0.0 ? opts.tol : g.h * g.h;
  // farthest reach of the domain in the -e direction
  double L = g.extent(ex, ey) - (g.cx * ex + g.cy * ey);
  res.lambda_start = -L;
  res.lambda0 = -L;
  GridInterpolator interp(g);
  const double cell = g.h * g.h;
  const double q = opts.dim / 2.0;

  for (int s = 1; s <= opts.steps; ++s) {
    double lam = -L + L * s / opts.steps;
    if (s == opts.steps) lam = 0.0;
    MovingPlaneState st;
    st.lambda = lam;
    double norm_acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        auto k = g.idx(i, j);
        if (!g.inside[k]) continue;
        double px = g.x(i), py = g.y(j);
        double d = lam - (px * ex + py * ey);
        if (!(d > 0.0)) continue;
        double rx = px + 2.0 * d * ex, ry = py + 2.0 * d * ey;
        if (!g.contains(rx, ry, -1e-12)) continue;
        double ul = interp(rx, ry);
        if (!std::isfinite(ul)) continue;
        double w = ul - g.u[k];
        ++st.count;
        st.min_w = std::min(st.min_w, w);
        if (opts.keep_w) {
          st.w_lambda.push_back(w);
          st.points.push_back(k);
        }
        if (opts.f) norm_acc += std::pow(std::abs(a_lambda_coefficient(*opts.f, g.u[k], ul)), q) * cell;
      }
    if (opts.f) st.a_lambda_norm = std::pow(norm_acc, 1.0 / q);
    if (st.count == 0) st.min_w = 0.0;
    if (!res.violated) {
      if (st.min_w >= -res.tol)
        res.lambda0 = lam;
      else
        res.violated = true;
    }
    st.lambda0 = res.lambda0;
    res.certificate.push_back(std::move(st));
  }
  return res;
}

/// Sweeps along n equally spaced axes 2 pi k / n.
inline std::vector<MovingPlaneResult> moving_plane_axes(const GridSolution2D& g, int n_axes = 8,
                                                        const MovingPlaneOptions& opts = {}, int jobs = 0) {
  std::vector<MovingPlaneResult> out(static_cast<std::size_t>(n_axes));
  parallel_for(out.size(), jobs, [&](std::size_t k) {
    double th = 2.0 * std::numbers::pi * static_cast<double>(k) / n_axes;
    out[k] = moving_plane_sweep(g, std::cos(th), std::sin(th), opts);
    out[k].axis_angle = th;
  });
  return out;
}

struct RadialDeviation {
  double max_deviation = 0.0;
  double radius_of_max = 0.0;
  std::vector<double> radii;
  std::vector<double> deviation;
  std::vector<double> averages;
  bool strictly_decreasing = true;
  double h = 0.0;
  double threshold = 0.0;  // 10 h^2
  bool passed() const { return max_deviation <= threshold && strictly_decreasing; }
};

/// Oscillation of u on discrete circles about the origin, radii h, 2h, ... up to two cells
/// inside the domain.
inline RadialDeviation radial_deviation(const GridSolution2D& g, double threshold_factor = 10.0) {
  RadialDeviation out;
  out.h = g.h;
  out.threshold = threshold_factor * g.h * g.h;
  GridInterpolator interp(g);
  double reach = std::numeric_limits<double>::infinity();
  if (auto d = std::get_if<Disk>(&g.geometry)) {
    reach = d->R - std::hypot(g.cx, g.cy);
  } else {
    auto& b = std::get<Box>(g.geometry);
    reach = std::min({b.a - std::abs(g.cx), b.b - std::abs(g.cy)});
  }
  int K = static_cast<int>(std::floor((reach - 2.0 * g.h) / g.h));
  for (int k = 1; k <= K; ++k) {
    double rho = k * g.h;
    int M = std::max(32, 2 * static_cast<int>(std::ceil(std::numbers::pi * rho / g.h)) * 2);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (int mth = 0; mth < M; ++mth) {
      double th = 2.0 * std::numbers::pi * mth / M;
      double v = interp(rho * std::cos(th), rho * std::sin(th));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    double dev = hi - lo;
    out.radii.push_back(rho);
    out.deviation.push_back(dev);
    out.averages.push_back(sum / M);
    if (dev > out.max_deviation) {
      out.max_deviation = dev;
      out.radius_of_max = rho;
    }
  }
  for (std::size_t k = 1; k < out.averages.size(); ++k)
    if (!(out.averages[k] < out.averages[k - 1])) out.strictly_decreasing = false;
  return out;
}

}  // namespace elliptica
