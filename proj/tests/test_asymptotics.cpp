#include <gtest/gtest.h>

#include <cmath>

#include "elliptica/asymptotics.hpp"
#include "elliptica/exponents.hpp"
#include "elliptica/gallery.hpp"
#include "elliptica/radial_solver.hpp"

using namespace elliptica;

namespace {

RadialProfile constant_profile(int N, double c, double r_max = 1e4) {
  return sample_profile(N, graded_mesh(r_max, 0.01, 1.05), [c](double) { return c; }, [](double) { return 0.0; });
}

}  // namespace

TEST(Exponents, ArithmeticCrossCheck) {
  for (int N = 3; N <= 10; ++N) {
    double a = alpha_exponent(N);
    EXPECT_NEAR(-(2.0 - N + 2.0 * a), gradient_tail_bound(N), 1e-14) << N;
    EXPECT_GT(2.0 - N + 2.0 * a, 0.0);
  }
  EXPECT_NEAR(sup_decay_bound(3), -0.9142135623730951, 1e-15);
  EXPECT_NEAR(gradient_tail_bound(3), -0.8284271247461903, 1e-15);
  EXPECT_DOUBLE_EQ(sup_decay_bound(5), -2.5);
  EXPECT_DOUBLE_EQ(gradient_tail_bound(5), -2.0);
}

TEST(Normalize, ConstantShiftsToZero) {
  auto q = normalize_to_zero_limit(constant_profile(4, 2.5));
  EXPECT_NEAR(q.meta()["normalized_limit"].get<double>(), 2.5, 1e-14);
  for (double v : q.u()) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(Normalize, BubbleLimitIsZero) {
  auto q = normalize_to_zero_limit(detail::bubble_profile(5));
  EXPECT_NEAR(q.meta()["normalized_limit"].get<double>(), 0.0, 1e-8);
}

TEST(Normalize, ExpN10HasNoFiniteLimit) {
  ShootingParams sp;
  sp.dim = 10;
  sp.center_value = 4.0;
  sp.r_max = 1000.0;
  EXPECT_THROW(normalize_to_zero_limit(shoot(make_exp(), sp)), NoFiniteLimitError);
}

TEST(SupDecay, Bubble) {
  for (int N : {3, 4, 5}) {
    auto fit = fit_sup_decay(normalize_to_zero_limit(detail::bubble_profile(N)));
    EXPECT_EQ(fit.verdict, Verdict::Holds) << N;
    EXPECT_LE(fit.exponent, sup_decay_bound(N) + 0.05);
    EXPECT_NEAR(fit.exponent, -(N - 2.0), 0.02) << N;
    EXPECT_GE(fit.radii.size(), 8u);
    EXPECT_LE(fit.drop_one_change, 0.03);
  }
}

TEST(GradientTail, Bubble) {
  for (int N : {3, 4, 5}) {
    auto fit = fit_gradient_tail(normalize_to_zero_limit(detail::bubble_profile(N)));
    EXPECT_EQ(fit.verdict, Verdict::Holds) << N;
    EXPECT_LE(fit.exponent, gradient_tail_bound(N) + 0.05);
    // |grad u|^2 ~ r^{-2(N-1)} integrated over an annulus of volume R^N
    EXPECT_NEAR(fit.exponent, -(N - 2.0), 0.03) << N;
    EXPECT_LE(fit.drop_one_change, 0.03);
  }
}

TEST(Decay, ConstantIsTrivial) {
  auto q = normalize_to_zero_limit(constant_profile(5, 1.0));
  auto s = fit_sup_decay(q);
  auto g = fit_gradient_tail(q);
  EXPECT_TRUE(s.trivial);
  EXPECT_TRUE(g.trivial);
  for (double v : g.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(s.verdict, Verdict::Holds);
}

TEST(Decay, RejectsDimensionOutsideRange) {
  auto q = normalize_to_zero_limit(detail::bubble_profile(3));
  auto p11 = sample_profile(11, graded_mesh(1e4, 0.01), [](double r) { return 1.0 / (1.0 + r * r); },
                            [](double r) { return -2.0 * r / ((1.0 + r * r) * (1.0 + r * r)); });
  EXPECT_THROW(fit_sup_decay(p11), std::invalid_argument);
  EXPECT_NO_THROW(fit_sup_decay(q));
}

TEST(Decay, TooFewSamplesRejected) {
  auto q = normalize_to_zero_limit(detail::bubble_profile(3, 500.0));
  EXPECT_THROW(fit_sup_decay(q), std::invalid_argument);
}

TEST(L2Star, BubbleFinite) {
  for (int N : {3, 4, 5}) EXPECT_EQ(l2star_norm(detail::bubble_profile(N)).verdict, NormVerdict::Finite) << N;
}

TEST(L2Star, ParaboloidDivergent) {
  auto p = sample_profile(3, graded_mesh(1e3, 0.01), [](double r) { return -r * r; }, [](double r) { return -2.0 * r; });
  EXPECT_EQ(l2star_norm(p).verdict, NormVerdict::Divergent);
}

TEST(L2Star, ZeroFinite) {
  auto e = l2star_norm(constant_profile(3, 0.0, 1e3));
  EXPECT_EQ(e.verdict, NormVerdict::Finite);
  EXPECT_EQ(e.value, 0.0);
}

TEST(CAlpha, ConstantRatioZero) {
  auto c = calpha_ratio(constant_profile(3, 2.0, 100.0), 10.0, 0.5);
  ASSERT_TRUE(c.ratio.has_value());
  EXPECT_EQ(*c.ratio, 0.0);
}

TEST(CAlpha, ZeroAverageIndeterminate) {
  EXPECT_FALSE(calpha_ratio(constant_profile(3, 0.0, 100.0), 10.0, 0.5).ratio.has_value());
}

TEST(CAlpha, ExpN9RatioBounded) {
  ShootingParams sp;
  sp.dim = 9;
  sp.center_value = 0.0;
  sp.r_max = 1000.0;
  auto p = shoot(make_exp(), sp);
  double mx = 0.0;
  for (double R : {4.0, 16.0, 64.0, 256.0, 1000.0}) mx = std::max(mx, *calpha_ratio(p, R, 0.5, 200).ratio);
  EXPECT_LT(mx, 10.0);
}

TEST(CAlpha, ParaboloidRatioIsScaleFree) {
  // u = -r^2: R^a [u]_{C^a(B_{R/2})} / mean|u| is the same number at every R; the oscillation
  // never becomes small relative to the average
  auto p = sample_profile(3, graded_mesh(1e3, 0.01), [](double r) { return -r * r; }, [](double r) { return -2.0 * r; });
  double r0 = *calpha_ratio(p, 8.0, 0.5, 200).ratio;
  for (double R : {32.0, 128.0, 512.0}) EXPECT_NEAR(*calpha_ratio(p, R, 0.5, 200).ratio, r0, 1e-6 * r0);
  EXPECT_THROW(calpha_ratio(p, 8.0, 1.5), std::invalid_argument);
}
