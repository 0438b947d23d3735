#pragma once

// Reference values computed outside this library (scipy solve_ivp/eigsh, mpmath quad and
// findroot) and frozen here. Tolerances live next to the assertions that use them.

namespace oracle {

// Dirichlet Laplacian on the unit ball, radial sector, N = 3
inline constexpr double kPiSquared = 9.869604401089358;

// root of p m (N-2-m) = (N-2)^2/4 with m = 2/(p-1), above the Sobolev exponent
inline constexpr double kHardyPower11 = 6.922024586816337;
inline constexpr double kHardyPower12 = 3.926649916142160;

// lowest radial eigenvalue of -Delta - 2(N-2)/r^2 on Annulus(0.1, 10), Dirichlet;
// log-variable finite differences at 2e4, 4e4, 8e4 intervals, Richardson extrapolated
inline constexpr double kSingularExpLambda1N9 = -2.4492945;
inline constexpr double kSingularExpLambda1N10 = 0.0784516268;
inline constexpr double kSingularExpLambda1N11 = 0.2019101346;

// centre value of the positive radial Dirichlet solution of -u'' - u'/r = ((u-1)^+)^2 on r < 4
inline constexpr double kTruncatedDiskCenter = 2.7873416932;

// x at which the half-space heteroclinic reaches 1/2: int_0^{1/2} du / sqrt(2(F(1) - F(u)))
inline constexpr double kLogisticHalfPoint = 0.97547377263636098;  // f = t(1-t)
inline constexpr double kSineHalfPoint = 0.49726179701054812;      // f = sin(pi t)

// Exp, N = 10, u(0) = 4: |S^9| int_0^R r u_r^2 dr / ln R at R = 2^4 .. 2^10 (DOP853, rtol 1e-12)
inline constexpr double kExpN10EnergyRatio[] = {108.49003250132385, 107.192840956886,  106.32842917505681,
                                                105.71101749190844, 105.24796037632399, 104.88780494807199,
                                                104.59968061226593};

// Exp, N = 10, u(0) = 0: u(1000) + 2 ln 1000 (DOP853); tends to ln 16
inline constexpr double kExpN10ShiftedAt1000 = 2.7725887161585234;

}  // namespace oracle
