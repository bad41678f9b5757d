#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "psmono/errors.hpp"
#include "psmono/grid.hpp"
#include "psmono/limits.hpp"

namespace psmono {

/// [lo, hi] with H of opposite sign at the two ends.
struct RootBracket {
  double lo = 0.0;
  double hi = 0.0;
  Sign sign_left = Sign::zero;
  Sign sign_right = Sign::zero;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

namespace detail {

inline Sign raw_sign(double v) { return v > 0 ? Sign::positive : v < 0 ? Sign::negative : Sign::zero; }

inline RootBracket bisect(const std::function<double(double)>& h, double lo, double hi, Sign sl, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Sign s = raw_sign(h(mid));
    if (s == sl || s == Sign::zero) lo = mid;
    else hi = mid;
  }
  return {lo, hi, sl, negate(sl)};
}

}  // namespace detail

/// Brackets of the sign changes of H on (0, end]. Scans the composite grid of
/// `grid` points (refined up to 3 times by a factor 4) until exactly `expected`
/// alternations show up, then bisects each one down to width `tol`.
inline std::vector<RootBracket> locate_turning_points(const std::function<Sample(double)>& h,
                                                      std::size_t expected, double end, double tol,
                                                      std::size_t grid = 4096, double tol_sign = 1e-8) {
  if (expected == 0) return {};
  std::string trace;
  for (int round = 0; round <= 3; ++round) {
    const std::size_t n = grid << (2 * round);
    const auto xs = composite_grid(end, n);
    std::vector<std::pair<double, double>> alternations;
    double prev_x = 0.0;
    Sign prev = Sign::zero;
    for (double x : xs) {
      const Sample s = h(x);
      const Sign sg = make_sign(s.value, tol_sign * std::max(1.0, s.scale)).sign;
      if (sg == Sign::zero) continue;
      if (prev != Sign::zero && sg != prev) alternations.emplace_back(prev_x, x);
      prev = sg;
      prev_x = x;
    }
    trace += " grid " + std::to_string(n) + ": " + std::to_string(alternations.size());
    if (alternations.size() != expected) continue;

    auto value = [&](double x) { return h(x).value; };
    std::vector<RootBracket> out;
    for (auto [lo, hi] : alternations) {
      // re-read the raw signs at the bracket ends; the scan used tolerance signs
      const Sign sl = detail::raw_sign(value(lo));
      out.push_back(detail::bisect(value, lo, hi, sl, tol));
    }
    return out;
  }
  throw localization_failure("expected " + std::to_string(expected) +
                             " sign changes of H, found" + trace);
}

}  // namespace psmono
