// lambda1 of -Delta - e^{u_s} on Annulus(0.1, 10) around N = 10.
#include <cstdio>

#include "elliptica/emden.hpp"
#include "elliptica/stability.hpp"

int main() {
  using namespace elliptica;
  for (int N = 8; N <= 12; ++N) {
    auto s = singular_solution(EmdenSpec::exp(), N);
    auto rep = singular_spectrum(s, {Annulus{0.1, 10.0}}, 4096);
    std::printf("N = %2d  lambda1 = % .6e  neg = %zu\n", N, rep.lambda1[0], rep.neg_count[0]);
  }
}
