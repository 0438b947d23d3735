#include <gtest/gtest.h>

#include <cmath>

#include "elliptica/radial_solver.hpp"
#include "elliptica/symmetry.hpp"
#include "oracles.hpp"

using namespace elliptica;

namespace {

constexpr double kH = 1.0 / 32.0;

GridSolution2D gaussian(double cx = 0.0, double cy = 0.0) {
  return sample_grid(Disk{1.0}, BoundaryCondition::Dirichlet0, kH, [=](double x, double y) {
    double dx = x - cx, dy = y - cy;
    return std::exp(-(dx * dx + dy * dy));
  });
}

}  // namespace

TEST(MovingPlane, RadialDataReachesOrigin) {
  auto g = gaussian();
  for (const auto& r : moving_plane_axes(g, 8)) {
    EXPECT_TRUE(r.reaches_origin()) << r.axis_angle;
    EXPECT_FALSE(r.violated);
    EXPECT_EQ(r.lambda0, 0.0);
    EXPECT_NEAR(r.lambda_start, -1.0, 1e-12);
  }
  auto d = radial_deviation(g);
  EXPECT_TRUE(d.passed()) << d.max_deviation;
  EXPECT_LE(d.max_deviation, 1e-3);
}

TEST(MovingPlane, ReflectionAcrossGridLineIsExact) {
  MovingPlaneOptions o;
  o.keep_w = true;
  o.steps = 16;
  auto r = moving_plane_sweep(gaussian(), 1.0, 0.0, o);
  const auto& last = r.certificate.back();
  EXPECT_EQ(last.lambda, 0.0);
  ASSERT_FALSE(last.w_lambda.empty());
  for (double w : last.w_lambda) EXPECT_LE(std::abs(w), 1e-15);
}

TEST(MovingPlane, CertificateMonotone) {
  auto r = moving_plane_sweep(gaussian(), 0.6, 0.8);
  ASSERT_EQ(r.certificate.size(), 64u);
  for (std::size_t k = 1; k < r.certificate.size(); ++k) {
    EXPECT_GT(r.certificate[k].lambda, r.certificate[k - 1].lambda);
    EXPECT_GE(r.certificate[k].lambda0, r.certificate[k - 1].lambda0);
  }
}

TEST(MovingPlane, UncenteredInputRejected) {
  auto g = gaussian(0.2, -0.1);
  EXPECT_THROW(moving_plane_sweep(g, 1.0, 0.0), UncenteredInputError);
  auto c = recenter(g);
  auto m = locate_maximum(c);
  auto [i0, j0] = origin_node(c);
  EXPECT_LE(std::abs(m.i - i0), 1);
  EXPECT_LE(std::abs(m.j - j0), 1);
  EXPECT_NEAR(c.cx, -0.2, kH);
  EXPECT_NEAR(c.cy, 0.1, kH);
  for (const auto& r : moving_plane_axes(c, 4)) EXPECT_TRUE(r.reaches_origin()) << r.axis_angle << " " << r.lambda0;
}

TEST(MovingPlane, NonradialDataViolates) {
  // two bumps on the x axis, the larger at the origin
  auto g = sample_grid(Disk{1.0}, BoundaryCondition::Dirichlet0, kH, [](double x, double y) {
    return std::exp(-10.0 * (x * x + y * y)) + 0.5 * std::exp(-20.0 * ((x + 0.5) * (x + 0.5) + y * y));
  });
  auto r = moving_plane_sweep(g, 1.0, 0.0);
  EXPECT_TRUE(r.violated);
  EXPECT_LT(r.lambda0, -0.1);
  EXPECT_FALSE(radial_deviation(g).passed());
}

TEST(RadialDeviation, LinearFunction) {
  auto g = sample_grid(Disk{1.0}, BoundaryCondition::Dirichlet0, kH, [](double x, double) { return x; });
  auto d = radial_deviation(g);
  ASSERT_FALSE(d.radii.empty());
  for (std::size_t k = 0; k < d.radii.size(); ++k) EXPECT_NEAR(d.deviation[k], 2.0 * d.radii[k], 1e-12);
  EXPECT_NEAR(d.max_deviation, 2.0 * d.radii.back(), 1e-12);
  EXPECT_FALSE(d.passed());
}

TEST(GridSolve, ZeroSourceGivesZero) {
  auto g = solve_grid_2d(make_constant(0.0), Disk{1.0}, BoundaryCondition::Dirichlet0, kH);
  for (double v : g.u) EXPECT_EQ(v, 0.0);
}

TEST(GridSolve, TorsionOnDisk) {
  // -Lap u = 4 on the unit disk: u = 1 - r^2, a quadratic the stencils reproduce
  auto g = solve_grid_2d(make_constant(4.0), Disk{1.0}, BoundaryCondition::Dirichlet0, kH);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.is_inside(i, j)) EXPECT_NEAR(g.at(i, j), 1.0 - g.x(i) * g.x(i) - g.y(j) * g.y(j), 1e-9);
  EXPECT_LE(g.residual_norm, 1e-8);
  for (const auto& r : moving_plane_axes(g, 8)) EXPECT_TRUE(r.reaches_origin());
}

TEST(GridSolve, TruncatedPowerOnDiskIsRadial) {
  auto f = make_truncated(2.0, 1.0);
  auto radial = dirichlet_ball_profile(f, 2, 4.0, 2.0, 4.0);
  GridSolveOptions o;
  o.initial_guess = [&](double x, double y) { return radial.u_at(std::min(std::hypot(x, y), 4.0)); };
  const double h = 1.0 / 16.0;
  auto g = solve_grid_2d(f, Disk{4.0}, BoundaryCondition::Dirichlet0, h, 1.0, o);
  auto [i0, j0] = origin_node(g);
  EXPECT_NEAR(g.at(i0, j0), oracle::kTruncatedDiskCenter, 20.0 * h * h);
  MovingPlaneOptions mo;
  mo.f = &f;
  mo.steps = 16;
  for (const auto& r : moving_plane_axes(g, 4, mo)) {
    EXPECT_TRUE(r.reaches_origin()) << r.axis_angle;
    for (const auto& s : r.certificate) EXPECT_GE(s.a_lambda_norm, 0.0);
  }
  EXPECT_TRUE(radial_deviation(g).passed());
}

TEST(ALambda, Coefficient) {
  auto e = make_exp();
  EXPECT_EQ(a_lambda_coefficient(e, 1.0, 2.0), 0.0);  // u <= u_lambda
  EXPECT_EQ(a_lambda_coefficient(e, 1.0, 1.0), 0.0);
  EXPECT_NEAR(a_lambda_coefficient(e, 2.0, 1.0), (std::exp(1.0) - std::exp(2.0)) / -1.0, 1e-14);
  EXPECT_GT(a_lambda_coefficient(e, 2.0, 1.0), 0.0);
  // decreasing branch of f
  auto ac = make_allen_cahn();
  EXPECT_LT(a_lambda_coefficient(ac, 1.0, 0.9), 0.0);
}

TEST(Grid, RejectsUnsupported) {
  EXPECT_THROW(make_grid(Disk{1.0}, BoundaryCondition::Neumann0, kH), std::invalid_argument);
  EXPECT_THROW(make_grid(Disk{1.0}, BoundaryCondition::Dirichlet0, 0.1), std::invalid_argument);
  EXPECT_THROW(make_grid(Box{1.0, 0.0}, BoundaryCondition::Dirichlet0, kH), std::invalid_argument);
  EXPECT_NO_THROW(make_grid(Box{1.0, 2.0}, BoundaryCondition::Neumann0, kH));
  EXPECT_THROW(moving_plane_sweep(gaussian(), 0.0, 0.0), std::invalid_argument);
}
