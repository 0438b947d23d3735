#pragma once

#include <cmath>

namespace elliptica {

/// alpha = N/2 + sqrt(N-1) - 2, the exponent of the power piece in the decay cut-off.
inline double alpha_exponent(double N) { return N / 2.0 + std::sqrt(N - 1.0) - 2.0; }

/// Sharp decay exponent of |u - inf u|: -N/2 - sqrt(N-1) + 2.
inline double sup_decay_bound(double N) { return -N / 2.0 - std::sqrt(N - 1.0) + 2.0; }

/// Decay exponent of the gradient energy on dyadic annuli: -2(sqrt(N-1) - 1).
inline double gradient_tail_bound(double N) { return -2.0 * (std::sqrt(N - 1.0) - 1.0); }

/// Critical Sobolev exponent 2N/(N-2).
inline double sobolev_exponent(double N) { return 2.0 * N / (N - 2.0); }

}  // namespace elliptica
