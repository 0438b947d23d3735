#include <gtest/gtest.h>

#include <cmath>

#include "elliptica/branch.hpp"
#include "elliptica/gallery.hpp"
#include "elliptica/radial_solver.hpp"
#include "elliptica/stability.hpp"
#include "oracles.hpp"

using namespace elliptica;

namespace {

ShootingParams params(int N, double a, double r_max) {
  ShootingParams sp;
  sp.dim = N;
  sp.center_value = a;
  sp.r_max = r_max;
  return sp;
}

}  // namespace

TEST(Shoot, ConstantSourceGivesParaboloid) {
  auto p = shoot(make_constant(6.0), params(3, 0.0, 10.0));
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p.u()[i], -p.r()[i] * p.r()[i], 1e-9);
  EXPECT_EQ(p.du()[0], 0.0);
}

TEST(Shoot, ExpN10ApproachesSingularShift) {
  auto p = shoot(make_exp(), params(10, 0.0, 1000.0));
  double shifted = p.u().back() + 2.0 * std::log(1000.0);
  EXPECT_NEAR(shifted, std::log(16.0), 0.05);
  EXPECT_NEAR(shifted, oracle::kExpN10ShiftedAt1000, 1e-6);
}

TEST(Shoot, ResidualWithinTolerance) {
  for (const char* name : {"exp", "power:3", "allen-cahn"}) {
    auto f = parse_nonlinearity(name);
    auto sp = params(5, 0.5, 30.0);
    sp.max_spacing = 0.05;  // allen-cahn oscillates; the 7-point check needs the waves resolved
    auto p = shoot(f, sp);
    auto rep = validate_profile(p, f, 1e-6, true);
    EXPECT_TRUE(rep.passed) << name << " scaled residual " << rep.max_scaled;
  }
}

TEST(Shoot, CriticalPowerMatchesBubble) {
  // U(r) = (1 + r^2/3)^{-1/2} solves -Delta U = U^5 in R^3 with U(0) = 1
  auto f = make_power(5.0);
  auto p = shoot(f, params(3, 1.0, 50.0));
  auto b = detail::bubble_profile(3, 50.0);
  for (double r = 0.0; r <= 50.0; r += 0.25) EXPECT_NEAR(p.u_at(r), b.u_at(r), 1e-7) << "r = " << r;
}

TEST(Shoot, SeriesHandoffIsStable) {
  auto f = make_exp();
  auto sp = params(10, 1.0, 100.0);
  auto p1 = shoot(f, sp);
  sp.series_radius = auto_series_radius(f, 1.0) / 2.0;
  auto p2 = shoot(f, sp);
  EXPECT_LE(std::abs(p1.u().back() - p2.u().back()), 1e-8 * std::abs(p1.u().back()));
}

TEST(Shoot, TighterToleranceConverges) {
  auto f = make_power(3.0);
  auto sp = params(4, 1.0, 50.0);
  sp.rel_tol = 1e-8;
  double u1 = shoot(f, sp).u().back();
  sp.rel_tol = 5e-9;
  double u2 = shoot(f, sp).u().back();
  sp.rel_tol = 1e-12;
  sp.abs_tol = 1e-14;
  double uref = shoot(f, sp).u().back();
  EXPECT_LE(std::abs(u2 - uref), 5.0 * std::max(std::abs(u1 - uref), 1e-12));
}

TEST(Shoot, FluxIsMonotoneForNonnegativeF) {
  // r^{N-1} u'(r) = -int_0^r s^{N-1} f(u) ds is nonincreasing when f >= 0
  for (const char* name : {"exp", "power:3", "truncated:2:1"}) {
    auto f = parse_nonlinearity(name);
    auto p = shoot(f, params(6, 2.0, 40.0));
    double prev = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
      double flux = std::pow(p.r()[i], 5) * p.du()[i];
      EXPECT_LE(flux, prev + 1e-9 * (1.0 + std::abs(prev))) << name << " r = " << p.r()[i];
      prev = flux;
    }
  }
}

TEST(Shoot, BlowUpReportsRadius) {
  // f = -t^3: u'' + 2u'/r = u^3 runs away from u(0) = 2
  auto f = make_custom(
      "anti-cubic", [](double t) { return -t * t * t; }, [](double t) { return -3.0 * t * t; },
      SignClass::sign_changing(), {0.0}, {-2.0, 2.0});
  try {
    shoot(f, params(3, 2.0, 10.0));
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_GT(e.radius(), 0.0);
    EXPECT_LT(e.radius(), 10.0);
  }
}

TEST(Shoot, RejectsBadParameters) {
  auto f = make_exp();
  auto sp = params(3, 0.0, 10.0);
  sp.rel_tol = 0.1;
  EXPECT_THROW(shoot(f, sp), std::invalid_argument);
  sp = params(0, 0.0, 10.0);
  EXPECT_THROW(shoot(f, sp), std::invalid_argument);
  sp = params(3, 0.0, -1.0);
  EXPECT_THROW(shoot(f, sp), std::invalid_argument);
}

TEST(Classify, ShotClasses) {
  EXPECT_EQ(classify_shot(shoot(make_exp(), params(10, 0.0, 1000.0)), make_exp()).cls, ShotClass::Unbounded);
  auto fp = make_power(7.0);
  auto c = classify_shot(shoot(fp, params(11, 1.0, 1000.0)), fp);
  EXPECT_EQ(c.cls, ShotClass::Bounded);
  EXPECT_NEAR(c.tail.limit, 0.0, 1e-2);
  auto fa = make_allen_cahn();
  EXPECT_EQ(classify_shot(shoot(fa, params(2, 0.5, 30.0)), fa).cls, ShotClass::Crossing);
}

TEST(Branch, PowerAboveThresholdHasBoundedStableProfiles) {
  auto f = make_power(7.0);
  BranchOptions o;
  o.samples = 8;
  o.refine_levels = 0;
  o.jobs = 1;
  auto b = find_bounded_stable_branch(f, 11, 0.1, 10.0, o);
  EXPECT_EQ(b.entries.size(), 8u);
  EXPECT_GE(b.bounded_stable_count(), 1u);
  for (const auto& e : b.entries)
    if (e.bounded_and_stable()) {
      EXPECT_GE(e.inf_estimate, -1e-9);
      for (double l : e.lambda1) EXPECT_GE(l, -1e-6);
    }
}

TEST(Branch, CriticalBubbleIsUnstable) {
  auto f = make_power(5.0);
  BranchOptions o;
  o.samples = 4;
  o.refine_levels = 0;
  o.morse_radii = {100.0, 1000.0};
  auto b = find_bounded_stable_branch(f, 3, 0.5, 2.0, o);
  for (const auto& e : b.entries) {
    EXPECT_EQ(e.cls, ShotClass::Bounded);
    ASSERT_FALSE(e.neg_count.empty());
    EXPECT_EQ(e.neg_count.back(), 1u);
    EXPECT_FALSE(e.bounded_and_stable());
  }
}

TEST(Branch, ExpN9DevelopsNegativeDirections) {
  BranchOptions o;
  o.samples = 5;
  o.log_spacing = false;
  o.refine_levels = 0;
  auto b = find_bounded_stable_branch(make_exp(), 9, 0.0, 4.0, o);
  for (const auto& e : b.entries) {
    ASSERT_FALSE(e.neg_count.empty());
    EXPECT_GE(e.neg_count.back(), 1u) << "a = " << e.a;
  }
}

TEST(Branch, RefinementAddsSamplesNearChanges) {
  // N = 10 power 3: the small-a shots look stable on the tested balls, larger ones do not
  BranchOptions o;
  o.samples = 6;
  o.refine_levels = 1;
  auto b = find_bounded_stable_branch(make_power(3.0), 10, 0.01, 10.0, o);
  EXPECT_GT(b.entries.size(), 6u);
  for (std::size_t i = 1; i < b.entries.size(); ++i) EXPECT_LT(b.entries[i - 1].a, b.entries[i].a);
}

TEST(Branch, RejectsLowDimension) {
  EXPECT_THROW(find_bounded_stable_branch(make_exp(), 2, 0.0, 1.0), std::invalid_argument);
}

TEST(HalfSpace, LogisticHeteroclinic) {
  auto f = make_logistic();
  auto p = halfspace_profile_1d(f, 1.0, 20.0);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_GE(p.u()[i], p.u()[i - 1]);
  EXPECT_NEAR(p.u().back(), 1.0, 1e-6);
  EXPECT_EQ(f(1.0), 0.0);
  EXPECT_LE(p.meta()["residual_max"].get<double>(), 1e-8);
  // u(x*) = 1/2 at the quadrature oracle
  EXPECT_NEAR(p.u_at(oracle::kLogisticHalfPoint), 0.5, 1e-8);
}

TEST(HalfSpace, SineHeteroclinic) {
  auto f = make_sine();
  auto p = halfspace_profile_1d(f, 1.0, 8.0);
  EXPECT_LE(p.meta()["residual_max"].get<double>(), 1e-8);
  EXPECT_NEAR(p.u_at(oracle::kSineHalfPoint), 0.5, 1e-8);
  for (double d : p.du()) EXPECT_GE(d, 0.0);
}

TEST(HalfSpace, RejectsDegenerateTargets) {
  EXPECT_THROW(halfspace_profile_1d(make_constant(0.0), 0.0, 10.0), std::invalid_argument);
  EXPECT_THROW(halfspace_profile_1d(make_logistic(), 0.5, 10.0), std::invalid_argument);
  EXPECT_THROW(halfspace_profile_1d(make_allen_cahn(), -1.0, 10.0), std::invalid_argument);
}

TEST(DirichletBall, TruncatedDiskCenter) {
  auto f = make_truncated(2.0, 1.0);
  auto p = dirichlet_ball_profile(f, 2, 4.0, 2.0, 4.0);
  EXPECT_NEAR(p.center_value(), oracle::kTruncatedDiskCenter, 1e-8);
  EXPECT_NEAR(p.u().back(), 0.0, 1e-9);
}
