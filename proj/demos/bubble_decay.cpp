// Decay exponents of the bubble against the stable-outside-a-ball bounds.
#include <cstdio>

#include "elliptica/asymptotics.hpp"
#include "elliptica/gallery.hpp"

int main() {
  using namespace elliptica;
  for (int N : {3, 4, 5}) {
    auto p = detail::bubble_profile(N);
    auto sup = fit_sup_decay(p);
    auto grad = fit_gradient_tail(p);
    std::printf("N = %d  sup %.4f (bound %.4f)  grad %.4f (bound %.4f)  L2* %s\n", N, sup.exponent, sup.bound,
                grad.exponent, grad.bound, to_string(l2star_norm(p).verdict));
  }
}
