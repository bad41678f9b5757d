#pragma once

// Reference computations for the test suite. Nothing here calls into the
// library's numerics: coefficients come from lgamma/pow, function values from
// <cmath> closed forms or long double direct summation.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "psmono/kernel_functions.hpp"

namespace oracle {

using psmono::KernelKind;
using psmono::KernelSpec;

/// Exponent of slot k for a kernel family.
inline int slot_exponent(KernelKind k, std::size_t slot) {
  const int s = static_cast<int>(slot);
  switch (k) {
    case KernelKind::neglog: return s + 1;
    case KernelKind::sinh: return 2 * s + 1;
    case KernelKind::cosh: return 2 * s;
    default: return s;
  }
}

/// Coefficient of x^slot_exponent(slot) in the kernel's Maclaurin series.
inline long double kernel_coefficient(const KernelSpec& s, std::size_t slot) {
  const long double k = static_cast<long double>(slot);
  const long double d = s.d;
  switch (s.kind) {
    case KernelKind::exp: return std::exp(-std::lgamma(k + 1.0L));
    case KernelKind::geometric: return 1.0L;
    case KernelKind::recip_pow: return std::exp(std::lgamma(d + k) - std::lgamma(d) - std::lgamma(k + 1.0L));
    case KernelKind::neglog: return std::pow(d, k + 1.0L) / (k + 1.0L);
    case KernelKind::sinh: return std::exp((2 * k + 1) * std::log(d) - std::lgamma(2 * k + 2.0L));
    case KernelKind::cosh: return std::exp(2 * k * std::log(d) - std::lgamma(2 * k + 1.0L));
    case KernelKind::polynomial: return slot <= static_cast<std::size_t>(s.degree) ? 1.0L : 0.0L;
  }
  return 0.0L;
}

/// order-th derivative of the kernel at x, from <cmath>.
inline double kernel_closed_form(const KernelSpec& s, int order, double x) {
  const double d = s.d;
  switch (s.kind) {
    case KernelKind::exp: return std::exp(x);
    case KernelKind::geometric:
    case KernelKind::recip_pow: {
      const double dd = s.kind == KernelKind::geometric ? 1.0 : d;
      double c = 1.0;
      for (int i = 0; i < order; ++i) c *= dd + i;
      return c * std::pow(1.0 - x, -dd - order);
    }
    case KernelKind::neglog:
      if (order == 0) return -std::log(1.0 - d * x);
      return std::tgamma(order) * std::pow(d, order) / std::pow(1.0 - d * x, order);
    case KernelKind::sinh:
      return std::pow(d, order) * (order % 2 == 0 ? std::sinh(d * x) : std::cosh(d * x));
    case KernelKind::cosh:
      return std::pow(d, order) * (order % 2 == 0 ? std::cosh(d * x) : std::sinh(d * x));
    case KernelKind::polynomial: {
      double v = 0.0;
      for (int k = order; k <= s.degree; ++k) {
        double c = 1.0;
        for (int i = 0; i < order; ++i) c *= k - i;
        v += c * std::pow(x, k - order);
      }
      return v;
    }
  }
  return 0.0;
}

/// Sum of c_e x^e over explicit (exponent, coefficient) terms.
struct Terms {
  std::vector<int> exponent;
  std::vector<long double> coeff;

  void add(int e, long double c) {
    exponent.push_back(e);
    coeff.push_back(c);
  }

  long double value(long double x, int order = 0) const {
    long double s = 0.0L;
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      const int e = exponent[i];
      if (e < order) continue;
      long double f = 1.0L;
      for (int j = 0; j < order; ++j) f *= e - j;
      s += coeff[i] * f * std::pow(x, static_cast<long double>(e - order));
    }
    return s;
  }
};

/// Numerator a_k = c_k beta_k with c_k given by `ratio(k)`, over `terms` slots.
inline Terms kernel_multiple(const KernelSpec& s, const std::function<long double(std::size_t)>& ratio,
                             std::size_t terms) {
  Terms t;
  for (std::size_t k = 0; k < terms; ++k) t.add(slot_exponent(s.kind, k), ratio(k) * kernel_coefficient(s, k));
  return t;
}

inline Terms from_coefficients(const std::vector<double>& c) {
  Terms t;
  for (std::size_t k = 0; k < c.size(); ++k) t.add(static_cast<int>(k), c[k]);
  return t;
}

/// H_{F,G}(x) = F'/G' G - F by direct summation.
inline long double h_value(const Terms& f, const Terms& g, long double x, int order = 0) {
  return f.value(x, order + 1) / g.value(x, order + 1) * g.value(x, order) - f.value(x, order);
}

/// Central finite difference of `fn` at x.
inline double central_difference(const std::function<double(double)>& fn, double x, double h = 1e-5) {
  return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

/// Sign changes of successive differences of sampled values, ignoring steps
/// below `tol` relative to the values.
inline std::size_t direction_changes(const std::vector<double>& v, double tol = 1e-13) {
  std::size_t n = 0;
  int prev = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = v[i] - v[i - 1];
    if (std::abs(d) <= tol * std::max(1.0, std::abs(v[i]))) continue;
    const int s = d > 0 ? 1 : -1;
    if (prev != 0 && s != prev) ++n;
    prev = s;
  }
  return n;
}

inline std::vector<double> uniform_points(double lo, double hi, std::size_t n) {
  std::vector<double> xs;
  for (std::size_t i = 1; i <= n; ++i) xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n + 1));
  return xs;
}

}  // namespace oracle
