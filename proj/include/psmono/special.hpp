#pragma once

#include <cmath>

namespace psmono {

/// Rising factorial (d)_k = d (d+1) ... (d+k-1), with (d)_0 = 1.
inline double pochhammer(double d, unsigned k) {
  double p = 1.0;
  for (unsigned i = 0; i < k; ++i) p *= d + static_cast<double>(i);
  return p;
}

/// Falling factorial e (e-1) ... (e-l+1); zero once a factor vanishes.
inline double falling_factorial(int e, int l) {
  double p = 1.0;
  for (int i = 0; i < l; ++i) p *= static_cast<double>(e - i);
  return p;
}

/// x ln x with the removable singularity at 0 filled in.
inline double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

}  // namespace psmono
