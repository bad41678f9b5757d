#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>

#include "psmono/errors.hpp"
#include "psmono/layout.hpp"
#include "psmono/special.hpp"

namespace psmono {

/// Built-in denominator families. Slot coefficients b_k:
///
///   exp          1/k!                     x^k       r = inf
///   recip_pow    (d)_k / k!               x^k       r = 1      (1-x)^-d
///   geometric    1                        x^k       r = 1      1/(1-x)
///   neglog       d^(k+1) / (k+1)          x^(k+1)   r = 1/d    -ln(1-dx)
///   sinh         d^(2k+1) / (2k+1)!       x^(2k+1)  r = inf
///   cosh         d^(2k) / (2k)!           x^(2k)    r = inf
///   polynomial   1 for k <= degree        x^k       r = inf    finite sum
enum class KernelKind { exp, recip_pow, geometric, neglog, sinh, cosh, polynomial };

struct KernelSpec {
  KernelKind kind = KernelKind::exp;
  double d = 1.0;
  int degree = 0;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

inline KernelSpec exp_kernel() { return {KernelKind::exp, 1.0, 0}; }
inline KernelSpec recip_pow_kernel(double d) { return {KernelKind::recip_pow, d, 0}; }
inline KernelSpec geometric_kernel() { return {KernelKind::geometric, 1.0, 0}; }
inline KernelSpec neglog_kernel(double d) { return {KernelKind::neglog, d, 0}; }
inline KernelSpec sinh_kernel(double d) { return {KernelKind::sinh, d, 0}; }
inline KernelSpec cosh_kernel(double d) { return {KernelKind::cosh, d, 0}; }
inline KernelSpec polynomial_kernel(int degree) { return {KernelKind::polynomial, 1.0, degree}; }

constexpr std::string_view to_string(KernelKind k) {
  switch (k) {
    case KernelKind::exp: return "exp";
    case KernelKind::recip_pow: return "recip_pow";
    case KernelKind::geometric: return "geometric";
    case KernelKind::neglog: return "neglog";
    case KernelKind::sinh: return "sinh";
    case KernelKind::cosh: return "cosh";
    case KernelKind::polynomial: return "polynomial";
  }
  return "exp";
}

inline KernelKind parse_kernel_kind(std::string_view s) {
  for (auto k : {KernelKind::exp, KernelKind::recip_pow, KernelKind::geometric, KernelKind::neglog,
                 KernelKind::sinh, KernelKind::cosh, KernelKind::polynomial}) {
    if (to_string(k) == s) return k;
  }
  throw parameter_error("unknown kernel '" + std::string(s) + "'");
}

inline bool kernel_has_parameter(KernelKind k) {
  return k == KernelKind::recip_pow || k == KernelKind::neglog || k == KernelKind::sinh ||
         k == KernelKind::cosh;
}

inline std::string kernel_label(const KernelSpec& s) {
  std::string out(to_string(s.kind));
  if (kernel_has_parameter(s.kind)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.17g)", s.d);
    out += buf;
  } else if (s.kind == KernelKind::polynomial) {
    out += "(" + std::to_string(s.degree) + ")";
  }
  return out;
}

inline void validate_kernel(const KernelSpec& s) {
  if (kernel_has_parameter(s.kind) && !(s.d > 0.0 && std::isfinite(s.d))) {
    throw parameter_error(std::string(to_string(s.kind)) + " kernel needs d > 0");
  }
  if (s.kind == KernelKind::polynomial && s.degree < 1) {
    throw parameter_error("polynomial kernel needs degree >= 1");
  }
}

inline Parity kernel_parity(const KernelSpec& s) {
  switch (s.kind) {
    case KernelKind::neglog: return Parity::shifted;
    case KernelKind::sinh: return Parity::odd;
    case KernelKind::cosh: return Parity::even;
    default: return Parity::general;
  }
}

inline double kernel_radius(const KernelSpec& s) {
  switch (s.kind) {
    case KernelKind::recip_pow:
    case KernelKind::geometric: return 1.0;
    case KernelKind::neglog: return 1.0 / s.d;
    default: return std::numeric_limits<double>::infinity();
  }
}

/// ln b_k for the base (undifferentiated) kernel, slot k.
inline double kernel_log_base_coefficient(const KernelSpec& s, std::size_t k) {
  const double kk = static_cast<double>(k);
  switch (s.kind) {
    case KernelKind::exp: return -std::lgamma(kk + 1.0);
    case KernelKind::recip_pow: return std::lgamma(s.d + kk) - std::lgamma(s.d) - std::lgamma(kk + 1.0);
    case KernelKind::geometric: return 0.0;
    case KernelKind::neglog: return (kk + 1.0) * std::log(s.d) - std::log(kk + 1.0);
    case KernelKind::sinh: return (2.0 * kk + 1.0) * std::log(s.d) - std::lgamma(2.0 * kk + 2.0);
    case KernelKind::cosh: return 2.0 * kk * std::log(s.d) - std::lgamma(2.0 * kk + 1.0);
    case KernelKind::polynomial:
      return static_cast<int>(k) <= s.degree ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

inline double kernel_base_coefficient_zero(const KernelSpec& s) {
  switch (s.kind) {
    case KernelKind::neglog:
    case KernelKind::sinh: return s.d;
    default: return 1.0;
  }
}

/// b_{k+1} / b_k for the base kernel.
inline double kernel_base_ratio(const KernelSpec& s, std::size_t k) {
  const double kk = static_cast<double>(k);
  switch (s.kind) {
    case KernelKind::exp: return 1.0 / (kk + 1.0);
    case KernelKind::recip_pow: return (s.d + kk) / (kk + 1.0);
    case KernelKind::geometric: return 1.0;
    case KernelKind::neglog: return s.d * (kk + 1.0) / (kk + 2.0);
    case KernelKind::sinh: return s.d * s.d / ((2.0 * kk + 2.0) * (2.0 * kk + 3.0));
    case KernelKind::cosh: return s.d * s.d / ((2.0 * kk + 1.0) * (2.0 * kk + 2.0));
    case KernelKind::polynomial: return static_cast<int>(k) + 1 <= s.degree ? 1.0 : 0.0;
  }
  return 0.0;
}

/// Slot coefficient j of the order-th derivative of the kernel.
inline double kernel_slot_coefficient(const KernelSpec& s, int order, std::size_t j) {
  const Parity p = kernel_parity(s);
  const std::size_t k = j + derivative_slot_shift(p, order);
  const double ff = falling_factorial(slot_exponent(p, k), order);
  if (ff == 0.0) return 0.0;
  return ff * std::exp(kernel_log_base_coefficient(s, k));
}

/// beta_{j+1} / beta_j for the order-th derivative.
inline double kernel_slot_ratio(const KernelSpec& s, int order, std::size_t j) {
  const Parity p = kernel_parity(s);
  const std::size_t k = j + derivative_slot_shift(p, order);
  const int e = slot_exponent(p, k);
  return kernel_base_ratio(s, k) * falling_factorial(e + parity_stride(p), order) /
         falling_factorial(e, order);
}

/// lim_{k->inf} beta_{k+1}/beta_k * t, with t = x^stride.
inline double kernel_asymptotic_ratio(const KernelSpec& s, double t) {
  switch (s.kind) {
    case KernelKind::recip_pow:
    case KernelKind::geometric: return t;
    case KernelKind::neglog: return s.d * t;
    default: return 0.0;
  }
}

/// Closed form of the order-th derivative of the kernel function at x.
inline double kernel_value(const KernelSpec& s, int order, double x) {
  switch (s.kind) {
    case KernelKind::exp: return std::exp(x);
    case KernelKind::geometric:
    case KernelKind::recip_pow: {
      const double d = s.kind == KernelKind::geometric ? 1.0 : s.d;
      return pochhammer(d, static_cast<unsigned>(order)) * std::pow(1.0 - x, -d - order);
    }
    case KernelKind::neglog: {
      if (order == 0) return -std::log1p(-s.d * x);
      return std::tgamma(static_cast<double>(order)) * std::pow(s.d, order) *
             std::pow(1.0 - s.d * x, -static_cast<double>(order));
    }
    case KernelKind::sinh: {
      const double scale = std::pow(s.d, order);
      return scale * (order % 2 == 0 ? std::sinh(s.d * x) : std::cosh(s.d * x));
    }
    case KernelKind::cosh: {
      const double scale = std::pow(s.d, order);
      return scale * (order % 2 == 0 ? std::cosh(s.d * x) : std::sinh(s.d * x));
    }
    case KernelKind::polynomial: {
      double v = 0.0;
      for (int k = s.degree; k >= order; --k) v = v * x + falling_factorial(k, order);
      return v;
    }
  }
  return 0.0;
}

}  // namespace psmono
