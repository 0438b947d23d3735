#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "elliptica/nonlinearity.hpp"

namespace elliptica {

using Json = nlohmann::json;

/// Radial function sampled on a strictly increasing mesh starting at r = 0.
/// Immutable after construction; safe to share between threads.
class RadialProfile {
 public:
  RadialProfile() = default;

  RadialProfile(int dim, std::vector<double> r, std::vector<double> u, std::vector<double> du,
                std::optional<std::vector<double>> d2u = std::nullopt, Json meta = Json::object(),
                std::string id = "profile")
      : dim_(dim), r_(std::move(r)), u_(std::move(u)), du_(std::move(du)), d2u_(std::move(d2u)),
        meta_(std::move(meta)), id_(std::move(id)) {
    if (dim_ < 1) throw std::invalid_argument("profile dimension must be >= 1");
    const std::size_t n = r_.size();
    if (n < 2 || u_.size() != n || du_.size() != n || (d2u_ && d2u_->size() != n))
      throw std::invalid_argument("profile channels must have equal length >= 2");
    if (r_[0] != 0.0) throw std::invalid_argument("profile mesh must start at r = 0");
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(r_[i]) || !std::isfinite(u_[i]) || !std::isfinite(du_[i]) ||
          (d2u_ && !std::isfinite((*d2u_)[i])))
        throw std::invalid_argument("profile contains non-finite values");
      if (i > 0 && !(r_[i] > r_[i - 1]))
        throw std::invalid_argument("profile mesh must be strictly increasing");
    }
    // du(0) = 0 is radial regularity; a one-dimensional profile u(x_1) is not bound by it.
    if (dim_ >= 2 && std::abs(du_[0]) > 1e-12 * (1.0 + std::abs(u_[0])))
      throw std::invalid_argument("radial profile must satisfy du(0) = 0");
    inf_estimate_ = *std::min_element(u_.begin(), u_.end());
  }

  int dim() const noexcept { return dim_; }
  const std::vector<double>& r() const noexcept { return r_; }
  const std::vector<double>& u() const noexcept { return u_; }
  const std::vector<double>& du() const noexcept { return du_; }
  const std::optional<std::vector<double>>& d2u() const noexcept { return d2u_; }
  const Json& meta() const noexcept { return meta_; }
  const std::string& id() const noexcept { return id_; }
  std::size_t size() const noexcept { return r_.size(); }
  double center_value() const { return u_.front(); }
  double r_max() const { return r_.back(); }
  double inf_estimate() const noexcept { return inf_estimate_; }

  RadialProfile with_inf_estimate(double v) const {
    RadialProfile p = *this;
    p.inf_estimate_ = v;
    return p;
  }
  RadialProfile with_meta(const std::string& key, Json value) const {
    RadialProfile p = *this;
    p.meta_[key] = std::move(value);
    return p;
  }
  RadialProfile with_id(std::string id) const {
    RadialProfile p = *this;
    p.id_ = std::move(id);
    return p;
  }

  /// Index i with r[i] <= x < r[i+1], clamped to the last interval.
  std::size_t locate(double x) const {
    if (x <= r_.front()) return 0;
    if (x >= r_.back()) return r_.size() - 2;
    auto it = std::upper_bound(r_.begin(), r_.end(), x);
    return static_cast<std::size_t>(it - r_.begin()) - 1;
  }

  /// Cubic Hermite interpolation of u using the du channel.
  double u_at(double x) const {
    check_range(x);
    std::size_t i = locate(x);
    return hermite(x, r_[i], r_[i + 1], u_[i], u_[i + 1], du_[i], du_[i + 1]);
  }

  /// Hermite interpolation of du using d2u when stored, else the derivative of the u interpolant.
  double du_at(double x) const {
    check_range(x);
    std::size_t i = locate(x);
    if (d2u_) return hermite(x, r_[i], r_[i + 1], du_[i], du_[i + 1], (*d2u_)[i], (*d2u_)[i + 1]);
    return hermite_deriv(x, r_[i], r_[i + 1], u_[i], u_[i + 1], du_[i], du_[i + 1]);
  }

  static double hermite(double x, double x0, double x1, double y0, double y1, double d0,
                        double d1) {
    double h = x1 - x0, s = (x - x0) / h;
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
           (s3 - s2) * h * d1;
  }
  static double hermite_deriv(double x, double x0, double x1, double y0, double y1, double d0,
                              double d1) {
    double h = x1 - x0, s = (x - x0) / h;
    double s2 = s * s;
    return ((6 * s2 - 6 * s) * y0 + (-6 * s2 + 6 * s) * y1) / h + (3 * s2 - 4 * s + 1) * d0 +
           (3 * s2 - 2 * s) * d1;
  }

 private:
  void check_range(double x) const {
    if (!(x >= 0.0) || x > r_.back() * (1.0 + 1e-12))
      throw std::out_of_range("radius " + std::to_string(x) + " outside profile mesh");
  }

  int dim_ = 1;
  std::vector<double> r_, u_, du_;
  std::optional<std::vector<double>> d2u_;
  Json meta_ = Json::object();
  std::string id_ = "profile";
  double inf_estimate_ = 0.0;
};

/// Uniform core of `core` cells of width h0, then spacing growing geometrically by `ratio`,
/// capped at max_spacing. The last node is exactly r_max.
inline std::vector<double> graded_mesh(double r_max, double h0, double ratio = 1.05,
                                       int core = 20,
                                       double max_spacing = std::numeric_limits<double>::infinity()) {
  if (!(r_max > 0.0) || !(h0 > 0.0) || !(ratio >= 1.0) || core < 1)
    throw std::invalid_argument("bad graded mesh parameters");
  std::vector<double> r{0.0};
  double h = std::min(h0, max_spacing);
  for (int i = 1; i <= core && r.back() + h < r_max; ++i) r.push_back(r.back() + h);
  while (r.back() + h < r_max) {
    h = std::min(h * ratio, max_spacing);
    r.push_back(r.back() + h);
  }
  // fold a tiny last cell into its neighbour
  if (r.size() > 2 && r_max - r.back() < 0.25 * (r.back() - r[r.size() - 2])) r.pop_back();
  r.push_back(r_max);
  return r;
}

inline std::vector<double> uniform_mesh(double r_max, double h) {
  if (!(r_max > 0.0) || !(h > 0.0)) throw std::invalid_argument("bad uniform mesh parameters");
  auto n = static_cast<std::size_t>(std::llround(r_max / h));
  n = std::max<std::size_t>(n, 1);
  std::vector<double> r(n + 1);
  for (std::size_t i = 0; i <= n; ++i) r[i] = r_max * static_cast<double>(i) / static_cast<double>(n);
  return r;
}

/// Samples closed-form data onto a mesh.
inline RadialProfile sample_profile(int dim, const std::vector<double>& mesh,
                                    const std::function<double(double)>& u,
                                    const std::function<double(double)>& du,
                                    const std::function<double(double)>& d2u = {},
                                    std::string id = "sampled") {
  std::vector<double> uu(mesh.size()), dd(mesh.size());
  std::optional<std::vector<double>> d2;
  if (d2u) d2.emplace(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    uu[i] = u(mesh[i]);
    dd[i] = du(mesh[i]);
    if (d2u) (*d2)[i] = d2u(mesh[i]);
  }
  Json meta = {{"source", "closed-form"}};
  return RadialProfile(dim, mesh, std::move(uu), std::move(dd), std::move(d2), std::move(meta),
                       std::move(id));
}

/// Finite-difference weights for derivatives 0..m at x0 on arbitrary nodes (Fornberg 1988).
/// Returns w[k][j], the weight of node j for the k-th derivative.
inline std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& x,
                                                         int m) {
  const int n = static_cast<int>(x.size()) - 1;
  // c[j][k]: weight of node j for the k-th derivative, updated in place node by node
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0, c4 = x[0] - x0;
  for (int i = 1; i <= n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<std::vector<double>> w(m + 1, std::vector<double>(n + 1));
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j <= n; ++j) w[k][j] = c[j][k];
  return w;
}

struct ResidualReport {
  double max_abs = 0.0;
  double l2 = 0.0;         // root-mean-square over checked points
  double max_scaled = 0.0; // max of |res| / (|u''| + |(N-1)u'/r| + |f(u)| + 1e-300)
  double tol = 0.0;
  bool scaled = false;
  bool passed = false;
  std::size_t skipped = 0;  // stencils straddling a kink of f
  std::vector<double> r;
  std::vector<double> residual;
};

/// Residual of u'' + (N-1)/r u' + f(u) at interior nodes. u'' comes from a 7-point
/// finite-difference stencil applied to the stored du channel (first derivative).
/// With scaled = true the verdict uses the relative residual max_scaled instead of max_abs.
/// Stencils across which u passes a kink of f are skipped: the third derivative of u jumps
/// there and the difference formula loses its order.
inline ResidualReport validate_profile(const RadialProfile& p, const Nonlinearity& f, double tol,
                                       bool scaled = false) {
  const auto& r = p.r();
  const auto& u = p.u();
  const auto& du = p.du();
  const std::size_t n = r.size();
  if (n < 16) throw std::invalid_argument("validate_profile needs at least 16 mesh points");
  const double nm1 = static_cast<double>(p.dim() - 1);
  ResidualReport rep;
  rep.tol = tol;
  rep.scaled = scaled;
  double sum2 = 0.0;
  std::vector<double> xs(7);
  for (std::size_t i = 3; i + 3 < n; ++i) {
    double lo = u[i - 3], hi = u[i - 3];
    for (int k = -2; k <= 3; ++k) {
      lo = std::min(lo, u[i + k]);
      hi = std::max(hi, u[i + k]);
    }
    if (std::any_of(f.kinks.begin(), f.kinks.end(), [&](double z) { return lo < z && z < hi; })) {
      ++rep.skipped;
      continue;
    }
    for (int k = 0; k < 7; ++k) xs[k] = r[i - 3 + k];
    auto w = fornberg_weights(r[i], xs, 1);
    double d2 = 0.0;
    for (int k = 0; k < 7; ++k) d2 += w[1][k] * du[i - 3 + k];
    double drift = nm1 * du[i] / r[i];
    double fu = f.eval(u[i]);
    double res = d2 + drift + fu;
    double scale = std::abs(d2) + std::abs(drift) + std::abs(fu) + 1e-300;
    rep.r.push_back(r[i]);
    rep.residual.push_back(res);
    rep.max_abs = std::max(rep.max_abs, std::abs(res));
    rep.max_scaled = std::max(rep.max_scaled, std::abs(res) / scale);
    sum2 += res * res;
  }
  rep.l2 = rep.residual.empty() ? 0.0 : std::sqrt(sum2 / static_cast<double>(rep.residual.size()));
  rep.passed = (scaled ? rep.max_scaled : rep.max_abs) <= tol;
  return rep;
}

}  // namespace elliptica
