#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "psmono/errors.hpp"

namespace psmono {

/// The interval (0, r); r may be +inf.
struct Domain {
  double r = 1.0;

  bool infinite() const { return std::isinf(r); }
};

/// Right end of the sampled part of the domain: r (1 - 1e-6), or x_max when r = inf.
inline double sampling_end(const Domain& d, double x_max) {
  return d.infinite() ? x_max : d.r * (1.0 - 1e-6);
}

/// Uniform points end i / n (i = 1..n) plus a geometric refinement
/// end / n * 2^-j towards 0, down to end * 1e-6. Sorted, strictly increasing.
inline std::vector<double> composite_grid(double end, std::size_t n) {
  if (n < 2) throw parameter_error("grid needs at least 2 points");
  if (!(end > 0.0) || !std::isfinite(end)) throw parameter_error("grid end must be positive and finite");
  std::vector<double> xs;
  const double h = end / static_cast<double>(n);
  for (double x = h * 0.5; x >= end * 1e-6; x *= 0.5) xs.push_back(x);
  std::reverse(xs.begin(), xs.end());
  for (std::size_t i = 1; i < n; ++i) xs.push_back(end * static_cast<double>(i) / static_cast<double>(n));
  xs.push_back(end);
  return xs;
}

}  // namespace psmono
