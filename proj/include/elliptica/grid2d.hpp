#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "elliptica/error.hpp"
#include "elliptica/nonlinearity.hpp"

namespace elliptica {

struct Disk {
  double R = 1.0;
};
/// [-a, a] x [-b, b]
struct Box {
  double a = 1.0;
  double b = 1.0;
};
using Geometry2D = std::variant<Disk, Box>;

enum class BoundaryCondition { Dirichlet0, Neumann0 };

inline const char* to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet0 ? "Dirichlet0" : "Neumann0";
}

inline std::string describe(const Geometry2D& g) {
  if (auto d = std::get_if<Disk>(&g)) return "Disk(" + std::to_string(d->R) + ")";
  auto& b = std::get<Box>(g);
  return "Box(" + std::to_string(b.a) + "," + std::to_string(b.b) + ")";
}

/// Node values on a uniform grid x_i = x0 + i h, y_j = y0 + j h.
/// The domain is `geometry` translated to (cx, cy); `inside` marks nodes strictly in it
/// (for Neumann boxes the edges count as inside, they carry unknowns).
struct GridSolution2D {
  Geometry2D geometry = Disk{};
  BoundaryCondition bc = BoundaryCondition::Dirichlet0;
  double h = 0.0;
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0;
  double cx = 0.0, cy = 0.0;
  std::vector<double> u;
  std::vector<char> inside;
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> history;
  std::string id;

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  double x(int i) const { return x0 + i * h; }
  double y(int j) const { return y0 + j * h; }
  double at(int i, int j) const { return u[idx(i, j)]; }
  bool is_inside(int i, int j) const {
    return i >= 0 && j >= 0 && i < nx && j < ny && inside[idx(i, j)];
  }

  /// Geometric membership of an arbitrary point (closed domain).
  bool contains(double px, double py, double slack = 0.0) const {
    double dx = px - cx, dy = py - cy;
    if (auto d = std::get_if<Disk>(&geometry)) return dx * dx + dy * dy <= (d->R + slack) * (d->R + slack);
    auto& b = std::get<Box>(geometry);
    return std::abs(dx) <= b.a + slack && std::abs(dy) <= b.b + slack;
  }

  /// Half-width of the domain seen along direction (ex, ey).
  double extent(double ex, double ey) const {
    if (auto d = std::get_if<Disk>(&geometry)) return d->R;
    auto& b = std::get<Box>(geometry);
    return b.a * std::abs(ex) + b.b * std::abs(ey);
  }

  /// Largest disk radius around the domain centre that stays in the domain.
  double inradius() const {
    if (auto d = std::get_if<Disk>(&geometry)) return d->R;
    auto& b = std::get<Box>(geometry);
    return std::min(b.a, b.b);
  }

  std::size_t inside_count() const {
    return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), 1));
  }
};

/// Empty grid covering the geometry centred at the origin, nodes aligned so that 0 is a node.
inline GridSolution2D make_grid(const Geometry2D& geom, BoundaryCondition bc, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  GridSolution2D g;
  g.geometry = geom;
  g.bc = bc;
  g.h = h;
  double ax, by;
  if (auto d = std::get_if<Disk>(&geom)) {
    if (!(d->R > 0.0)) throw std::invalid_argument("disk radius must be positive");
    if (bc == BoundaryCondition::Neumann0) throw std::invalid_argument("Neumann0 is only supported on boxes");
    ax = by = d->R;
  } else {
    auto& b = std::get<Box>(geom);
    if (!(b.a > 0.0 && b.b > 0.0)) throw std::invalid_argument("box half-widths must be positive");
    ax = b.a;
    by = b.b;
  }
  if (2.0 * std::min(ax, by) / h < 64.0 - 1e-9)
    throw std::invalid_argument("grid too coarse: fewer than 64 points across the domain");
  int mx = static_cast<int>(std::ceil(ax / h - 1e-9));
  int my = static_cast<int>(std::ceil(by / h - 1e-9));
  g.nx = 2 * mx + 1;
  g.ny = 2 * my + 1;
  g.x0 = -mx * h;
  g.y0 = -my * h;
  g.u.assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);
  g.inside.assign(g.u.size(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double x = g.x(i), y = g.y(j);
      bool in;
      if (auto d = std::get_if<Disk>(&geom)) {
        in = x * x + y * y < d->R * d->R * (1.0 - 1e-12);
      } else {
        auto& b = std::get<Box>(geom);
        double ex = b.a * (1.0 + 1e-12), ey = b.b * (1.0 + 1e-12);
        if (bc == BoundaryCondition::Neumann0)
          in = std::abs(x) <= ex && std::abs(y) <= ey;
        else
          in = std::abs(x) < b.a * (1.0 - 1e-12) && std::abs(y) < b.b * (1.0 - 1e-12);
      }
      g.inside[g.idx(i, j)] = in ? 1 : 0;
    }
  return g;
}

/// Samples fn on the inside nodes of a fresh grid (synthetic inputs, initial guesses).
inline GridSolution2D sample_grid(const Geometry2D& geom, BoundaryCondition bc, double h,
                                  const std::function<double(double, double)>& fn,
                                  std::string id = "sampled") {
  auto g = make_grid(geom, bc, h);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.inside[g.idx(i, j)]) g.u[g.idx(i, j)] = fn(g.x(i), g.y(j));
  g.id = std::move(id);
  return g;
}

namespace detail {

/// -Laplacian on the inside nodes: 5-point stencil, Shortley-Weller arms at a curved
/// Dirichlet boundary, mirrored ghosts for Neumann edges.
struct GridOperator {
  std::vector<int> unknown;    // node -> unknown index or -1
  std::vector<int> node;       // unknown -> node
  Eigen::SparseMatrix<double> A;
};

inline GridOperator assemble_laplacian(const GridSolution2D& g) {
  GridOperator op;
  op.unknown.assign(g.u.size(), -1);
  for (std::size_t k = 0; k < g.u.size(); ++k)
    if (g.inside[k]) {
      op.unknown[k] = static_cast<int>(op.node.size());
      op.node.push_back(static_cast<int>(k));
    }
  const int n = static_cast<int>(op.node.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  const double h = g.h;
  const Disk* disk = std::get_if<Disk>(&g.geometry);
  const bool neumann = g.bc == BoundaryCondition::Neumann0;

  for (int row = 0; row < n; ++row) {
    int k = op.node[row];
    int i = k % g.nx, j = k / g.nx;
    double x = g.x(i) - g.cx, y = g.y(j) - g.cy;
    double diag = 0.0;
    // axis 0: x, axis 1: y
    for (int axis = 0; axis < 2; ++axis) {
      int ip = axis == 0 ? i + 1 : i, jp = axis == 0 ? j : j + 1;
      int im = axis == 0 ? i - 1 : i, jm = axis == 0 ? j : j - 1;
      bool in_p = g.is_inside(ip, jp), in_m = g.is_inside(im, jm);
      if (neumann) {
        // edge nodes reflect across the edge
        int kp = in_p ? static_cast<int>(g.idx(ip, jp)) : static_cast<int>(g.idx(im, jm));
        int km = in_m ? static_cast<int>(g.idx(im, jm)) : static_cast<int>(g.idx(ip, jp));
        diag += 2.0 / (h * h);
        trip.emplace_back(row, op.unknown[kp], -1.0 / (h * h));
        trip.emplace_back(row, op.unknown[km], -1.0 / (h * h));
        continue;
      }
      double hp = h, hm = h;
      if (!in_p && disk) {
        double c = axis == 0 ? y : x, s = axis == 0 ? x : y;
        hp = std::sqrt(std::max(0.0, disk->R * disk->R - c * c)) - s;
      }
      if (!in_m && disk) {
        double c = axis == 0 ? y : x, s = axis == 0 ? x : y;
        hm = s + std::sqrt(std::max(0.0, disk->R * disk->R - c * c));
      }
      hp = std::clamp(hp, 1e-3 * h, h);
      hm = std::clamp(hm, 1e-3 * h, h);
      double scale = 2.0 / (hp + hm);
      diag += scale * (1.0 / hp + 1.0 / hm);
      if (in_p) trip.emplace_back(row, op.unknown[g.idx(ip, jp)], -scale / hp);
      if (in_m) trip.emplace_back(row, op.unknown[g.idx(im, jm)], -scale / hm);
      // boundary values are zero: nothing moves to the right-hand side
    }
    trip.emplace_back(row, row, diag);
  }
  op.A.resize(n, n);
  op.A.setFromTriplets(trip.begin(), trip.end());
  op.A.makeCompressed();
  return op;
}

}  // namespace detail

struct GridSolveOptions {
  double tol = 1e-8;
  int max_iter = 40;
  /// Initial guess u0(x, y); zero when empty.
  std::function<double(double, double)> initial_guess;
};

/// Discrete residual max |-Lap_h u - f(u)| over the inside nodes.
inline double grid_residual(const GridSolution2D& g, const Nonlinearity& f) {
  auto op = detail::assemble_laplacian(g);
  Eigen::VectorXd v(op.node.size());
  for (std::size_t r = 0; r < op.node.size(); ++r) v[r] = g.u[op.node[r]];
  Eigen::VectorXd F = op.A * v;
  double m = 0.0;
  for (Eigen::Index r = 0; r < F.size(); ++r) m = std::max(m, std::abs(F[r] - f.eval(v[r])));
  return m;
}

/// Damped Newton on -Lap_h u = f(u). The Jacobian is refactorised only when the
/// residual contraction stalls, so a good initial guess costs one LU.
inline GridSolution2D solve_grid_2d(const Nonlinearity& f, const Geometry2D& geom,
                                    BoundaryCondition bc, double h, double damping = 1.0,
                                    const GridSolveOptions& opts = {}) {
  if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
  auto g = make_grid(geom, bc, h);
  auto op = detail::assemble_laplacian(g);
  const Eigen::Index n = static_cast<Eigen::Index>(op.node.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (opts.initial_guess)
    for (Eigen::Index r = 0; r < n; ++r) {
      int k = op.node[r];
      v[r] = opts.initial_guess(g.x(k % g.nx), g.y(k / g.nx));
    }

  auto residual = [&](const Eigen::VectorXd& w, Eigen::VectorXd& F) {
    F = op.A * w;
    for (Eigen::Index r = 0; r < n; ++r) F[r] -= f.eval(w[r]);
    return F.lpNorm<Eigen::Infinity>();
  };

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analysed = false;
  auto factor = [&](const Eigen::VectorXd& w) {
    Eigen::SparseMatrix<double> J = op.A;
    for (Eigen::Index r = 0; r < n; ++r) J.coeffRef(r, r) -= f.deriv1(w[r]);
    if (!analysed) {
      lu.analyzePattern(J);
      analysed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw NonConvergenceError("grid Jacobian is singular", std::numeric_limits<double>::infinity());
  };

  Eigen::VectorXd F, Ftrial, trial;
  double res = residual(v, F);
  g.history.push_back(res);
  double best = res;
  bool have_lu = false, lu_at_v = false;
  for (int it = 0; it < opts.max_iter && res > opts.tol; ++it) {
    if (!have_lu) {
      factor(v);
      have_lu = lu_at_v = true;
    }
    Eigen::VectorXd delta = lu.solve(-F);
    double t = damping, rt = res;
    bool accepted = false;
    for (int back = 0; back < 30 && !accepted; ++back) {
      trial = v + t * delta;
      rt = residual(trial, Ftrial);
      accepted = std::isfinite(rt) && rt < res;
      t *= 0.5;
    }
    if (!accepted) {
      if (lu_at_v) break;
      have_lu = false;  // stale chord Jacobian: refresh and retry
      continue;
    }
    double ratio = rt / res;
    v.swap(trial);
    F.swap(Ftrial);
    res = rt;
    best = std::min(best, res);
    g.history.push_back(res);
    lu_at_v = false;
    // chord steps are kept while the residual drops fast
    if (ratio > 0.1) have_lu = false;
  }
  if (!(res <= opts.tol))
    throw NonConvergenceError("grid Newton iteration did not reach the residual tolerance", best);
  for (Eigen::Index r = 0; r < n; ++r) g.u[op.node[r]] = v[r];
  g.residual_norm = res;
  g.id = f.name + "-" + describe(geom) + "-h" + std::to_string(h);
  return g;
}

}  // namespace elliptica
