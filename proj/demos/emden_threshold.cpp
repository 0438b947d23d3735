// Fixed point of the Emden system for u'' + (N-1)/r u' + e^u = 0, N = 3..20.
#include <cstdio>

#include "elliptica/emden.hpp"

int main() {
  using namespace elliptica;
  std::printf("%4s %14s %16s\n", "N", "discriminant", "class");
  for (int N = 3; N <= 20; ++N) {
    auto sys = build_emden(EmdenSpec::exp(), N);
    std::printf("%4d %14lld %16s\n", N, exp_discriminant_exact(N), to_string(classify_fixed_point(sys)));
  }
}
