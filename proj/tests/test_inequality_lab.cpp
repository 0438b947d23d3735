#include <gtest/gtest.h>

#include <cmath>

#include "elliptica/gallery.hpp"
#include "elliptica/inequality_lab.hpp"
#include "elliptica/radial_solver.hpp"
#include "oracles.hpp"

using namespace elliptica;

namespace {

RadialProfile exp_n10(double a = 4.0) {
  ShootingParams sp;
  sp.dim = 10;
  sp.center_value = a;
  sp.r_max = 1000.0;
  return shoot(make_exp(), sp);
}

RadialProfile constant_profile(int N, double c, double r_max) {
  return sample_profile(N, graded_mesh(r_max, 0.01), [c](double) { return c; }, [](double) { return 0.0; });
}

// the bubble rescaled so that it is stable outside B_1
RadialProfile stable_bubble(int N) {
  const double lam = N == 3 ? 4.0 : 8.0;
  auto b = detail::bubble_profile(N, 1e4 * lam);
  std::vector<double> r, u, du;
  for (std::size_t i = 0; i < b.size(); ++i) {
    double s = b.r()[i] / lam;
    if (s > 1e4) break;
    r.push_back(s);
    u.push_back(std::pow(lam, (N - 2) / 2.0) * b.u()[i]);
    du.push_back(std::pow(lam, N / 2.0) * b.du()[i]);
  }
  return RadialProfile(N, r, u, du, std::nullopt, Json::object(), "bubble-scaled");
}

}  // namespace

TEST(Zeta, PiecewiseCutoffPieces) {
  auto z = zeta_theorem1(3.0, 10.0);
  EXPECT_DOUBLE_EQ(z.left_limit(1), 81.0);
  EXPECT_DOUBLE_EQ(z.right_limit(1), 81.0);
  EXPECT_NEAR(z(100.0), 0.0, 1e-12);
  EXPECT_NEAR(z(10.0), 81.0, 1e-12);
  for (double r : {0.1, 1.0, 2.9}) EXPECT_NEAR(z.r_dzeta(r), 4.0 * z(r), 1e-12 * z(r));
  EXPECT_THROW(zeta_theorem1(5.0, 5.0), std::invalid_argument);
  EXPECT_THROW(zeta_theorem1(1.0, 5.0), std::invalid_argument);
}

TEST(Zeta, PowerCutoffPieces) {
  EXPECT_DOUBLE_EQ(alpha_exponent(10), 6.0);
  EXPECT_NEAR(alpha_exponent(3), 1.5 + std::sqrt(2.0) - 2.0, 1e-15);
  EXPECT_NEAR(alpha_exponent(3), 0.91421, 1e-5);
  double a = alpha_exponent(5);
  auto z = zeta_theorem8(a, 10.0, 100.0);
  EXPECT_NEAR(z.left_limit(2), std::pow(2.0, a), 1e-12);
  EXPECT_NEAR(z.right_limit(2), std::pow(2.0, a), 1e-12);
  EXPECT_EQ(z.support_start(), 1.0);
  EXPECT_EQ(z.support_end(), 1e4);
  EXPECT_LE(z.max_jump(), 1e-12);
  // the perturbed exponent for the borderline dimension
  EXPECT_NO_THROW(zeta_theorem8(alpha_exponent(10) - 0.1, 10.0, 30.0));
  EXPECT_THROW(zeta_theorem8(a, 10.0, 5.0), std::invalid_argument);
  EXPECT_THROW(zeta_theorem8(a, 2.0, 5.0), std::invalid_argument);
  EXPECT_THROW(zeta_theorem8(-1.0, 10.0, 50.0), std::invalid_argument);
}

TEST(Cancellation, IdentityHoldsForAllDimensions) {
  EXPECT_EQ(cancellation_identity(10), 0.0);
  for (int N = 3; N <= 64; ++N) EXPECT_LE(std::abs(cancellation_identity(N)), 1e-12) << N;
  EXPECT_LE(std::abs(cancellation_identity(3)), 1e-12);
  EXPECT_LE(std::abs(cancellation_identity(6)), 1e-12);
  EXPECT_THROW(cancellation_identity(2), std::invalid_argument);
}

TEST(Cancellation, CutoffIntegrandVanishesAtTen) {
  auto z = zeta_theorem1(5.0, 50.0);
  const int N = 10;
  // on [0, R) only; the logarithmic cap beyond R is not covered by the identity
  for (int i = 1; i <= 1000; ++i) {
    double r = 50.0 * (i - 0.5) / 1000.0;
    double rz = z.r_dzeta(r);
    EXPECT_LE(std::abs(rz * ((6.0 - N) * z(r) + rz)), 1e-12 * (1.0 + z(r) * z(r))) << r;
  }
}

TEST(Radial22, ConstantProfileBothSidesZero) {
  auto p = constant_profile(5, 0.0, 200.0);
  LedgerOptions o;
  o.check_stability = false;
  auto L = evaluate_radial_22(p, zeta_theorem1(3.0, 10.0), make_power(3.0), o);
  EXPECT_EQ(L.lhs, 0.0);
  EXPECT_EQ(L.rhs, 0.0);
}

TEST(Radial22, ExpN10HoldsAtTwoResolutions) {
  auto p = exp_n10();
  auto z = zeta_theorem1(5.0, 30.0);
  for (int level : {1, 2}) {
    LedgerOptions o;
    o.level = level;
    auto L = evaluate_radial_22(p, z, make_exp(), o);
    EXPECT_TRUE(L.precondition.stable);
    EXPECT_GE(L.slack, -L.quadrature_error);
    EXPECT_LT(L.quadrature_error, 0.01 * L.largest_term());
    // dilation side vanishes on [0, R1) at N = 10
    EXPECT_LE(std::abs(L.find("dilation[0,5)")->value), 1e-12 * L.largest_term());
  }
}

TEST(Radial22, QuadratureConvergence) {
  auto p = exp_n10();
  auto z = zeta_theorem1(5.0, 30.0);
  LedgerOptions o1, o2;
  o2.level = 2;
  auto L1 = evaluate_radial_22(p, z, make_exp(), o1);
  auto L2 = evaluate_radial_22(p, z, make_exp(), o2);
  ASSERT_EQ(L1.terms.size(), L2.terms.size());
  for (std::size_t i = 0; i < L1.terms.size(); ++i)
    EXPECT_LE(std::abs(L1.terms[i].value - L2.terms[i].value), 10.0 * L1.terms[i].error + 1e-9 * std::abs(L1.terms[i].value))
        << L1.terms[i].name;
}

TEST(Radial22, UnstableSupportRejectedUnlessOverridden) {
  auto p = detail::bubble_profile(3, 1e4);
  auto z = zeta_theorem1(5.0, 50.0);
  EXPECT_THROW(evaluate_radial_22(p, z, make_power(5.0)), PreconditionError);
  LedgerOptions o;
  o.override_stability = true;
  auto L = evaluate_radial_22(p, z, make_power(5.0), o);
  EXPECT_TRUE(L.precondition.overridden);
  EXPECT_FALSE(L.precondition.stable);
}

TEST(Radial22, SupportBeyondMesh) {
  auto p = exp_n10();
  EXPECT_THROW(evaluate_radial_22(p, zeta_theorem1(5.0, 40.0), make_exp()), std::invalid_argument);
}

TEST(Pohozaev, BubbleN5Holds) {
  auto p = stable_bubble(5);
  auto z = zeta_theorem8(alpha_exponent(5), 10.0, 100.0);
  for (int level : {1, 2}) {
    LedgerOptions o;
    o.level = level;
    auto L = evaluate_pohozaev(p, z, make_power(7.0 / 3.0), o);
    EXPECT_GE(L.slack, -L.quadrature_error);
    EXPECT_LT(L.quadrature_error, 0.01 * L.largest_term());
    for (const auto& t : L.terms)
      if (t.name.rfind("gradient_tangential", 0) == 0) EXPECT_EQ(t.value, 0.0);
  }
}

TEST(Pohozaev, BubbleN3Holds) {
  auto p = stable_bubble(3);
  auto L = evaluate_pohozaev(p, zeta_theorem8(alpha_exponent(3), 10.0, 100.0), make_power(5.0));
  EXPECT_TRUE(L.consistent());
}

TEST(Pohozaev, NetRadialVanishesAtAlpha) {
  auto p = stable_bubble(5);
  auto L = evaluate_pohozaev(p, zeta_theorem8(alpha_exponent(5), 10.0, 100.0), make_power(7.0 / 3.0));
  const auto* net = L.find("net_radial[2,10)");
  ASSERT_NE(net, nullptr);
  EXPECT_LE(std::abs(net->value), 1e-10 * L.largest_term());
}

TEST(Pohozaev, ZeroCoefficientAtTen) {
  auto p = exp_n10();
  auto L = evaluate_pohozaev(p, zeta_theorem8(alpha_exponent(10), 5.0, 30.0), make_exp());
  for (const auto& t : L.terms)
    if (t.name.rfind("weighted_radial", 0) == 0) EXPECT_EQ(t.value, 0.0);
}

TEST(Pohozaev, PreconditionErrors) {
  auto p = stable_bubble(5);
  auto z = zeta_theorem8(alpha_exponent(5), 10.0, 100.0);
  ShootingParams sp;
  sp.dim = 11;
  sp.r_max = 1e4;
  auto p11 = shoot(make_power(7.0), sp);
  EXPECT_THROW(evaluate_pohozaev(p11, z, make_power(7.0)), std::invalid_argument);
  EXPECT_THROW(evaluate_pohozaev(p, zeta_theorem1(3.0, 10.0), make_power(7.0 / 3.0)), std::invalid_argument);
}

TEST(WeightedEnergy, ConstantIsZero) {
  auto g = weighted_energy_growth(constant_profile(10, 2.0, 1100.0), dyadic_radii(4, 10));
  for (double e : g.energy) EXPECT_EQ(e, 0.0);
}

TEST(WeightedEnergy, ExpN10RatioDecreasing) {
  auto g = weighted_energy_growth(exp_n10(), dyadic_radii(4, 9));
  EXPECT_TRUE(g.strictly_decreasing);
  for (std::size_t i = 0; i < g.ratio.size(); ++i) EXPECT_NEAR(g.ratio[i], oracle::kExpN10EnergyRatio[i], 1e-6 * g.ratio[i]);
}

TEST(WeightedEnergy, ParaboloidRatioDiverges) {
  const int N = 10;
  auto p = sample_profile(N, graded_mesh(1100.0, 0.01, 1.02), [](double r) { return -r * r; },
                          [](double r) { return -2.0 * r; });
  auto g = weighted_energy_growth(p, dyadic_radii(4, 10));
  EXPECT_TRUE(g.strictly_increasing);
  // int_0^R |S| r 4r^2 dr = |S| R^4
  for (std::size_t i = 0; i < g.radii.size(); ++i)
    EXPECT_NEAR(g.energy[i], sphere_area(N) * std::pow(g.radii[i], 4), 1e-8 * g.energy[i]);
}

TEST(H1Ratio, ConstantIsZero) {
  auto h = h1_ratio(constant_profile(5, 3.0, 100.0), 10.0);
  ASSERT_TRUE(h.ratio.has_value());
  EXPECT_EQ(*h.ratio, 0.0);
}

TEST(H1Ratio, BubbleGrowsLikeCube) {
  // finite Dirichlet energy over R^3 (mean u)^2 ~ R^3 R^{-6}: the ratio grows like R^3
  auto p = detail::bubble_profile(5, 1e4);
  double a = *h1_ratio(p, 256.0).ratio, b = *h1_ratio(p, 1024.0).ratio;
  EXPECT_NEAR(std::log(b / a) / std::log(4.0), 3.0, 0.05);
}

TEST(H1Ratio, VanishingAverageIsIndeterminate) {
  auto h = h1_ratio(constant_profile(5, 0.0, 100.0), 10.0);
  EXPECT_FALSE(h.ratio.has_value());
}
