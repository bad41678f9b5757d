#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "psmono/errors.hpp"
#include "psmono/kernel_functions.hpp"
#include "psmono/limits.hpp"
#include "psmono/series_core.hpp"
#include "psmono/special.hpp"

namespace psmono {

/// The kernel as a power series with N stored slots and its exact tail.
inline PowerSeries make_kernel(const KernelSpec& spec, std::size_t n = kDefaultTruncation) {
  validate_kernel(spec);
  if (n < 2) throw parameter_error("kernel truncation needs N >= 2");
  if (spec.kind == KernelKind::polynomial) {
    return PowerSeries(std::vector<double>(static_cast<std::size_t>(spec.degree) + 1, 1.0));
  }
  std::vector<double> c(n);
  c[0] = kernel_slot_coefficient(spec, 0, 0);
  for (std::size_t k = 1; k < n; ++k) c[k] = c[k - 1] * kernel_base_ratio(spec, k - 1);
  return PowerSeries(std::move(c), KernelTail{spec}, kernel_radius(spec), kernel_parity(spec));
}

/// The normalized sequence a_k / b_k for the kernel, from the factorial and
/// Pochhammer forms directly (k! a_k for exp, k! a_k / (d)_k for recip_pow, ...).
inline std::vector<double> kernel_ratio_sequence(const KernelSpec& spec, const PowerSeries& a) {
  validate_kernel(spec);
  if (a.parity() != kernel_parity(spec)) {
    throw hypothesis_violation("numerator uses " + std::string(to_string(a.parity())) +
                               " slots but the " + kernel_label(spec) + " kernel uses " +
                               std::string(to_string(kernel_parity(spec))) + " slots");
  }
  const auto c = a.coeffs();
  std::vector<double> out(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double d = spec.d;
    switch (spec.kind) {
      case KernelKind::exp: out[k] = c[k] * std::exp(std::lgamma(kk + 1.0)); break;
      case KernelKind::recip_pow:
        out[k] = c[k] * std::exp(std::lgamma(kk + 1.0)) / pochhammer(d, static_cast<unsigned>(k));
        break;
      case KernelKind::geometric: out[k] = c[k]; break;
      case KernelKind::neglog: out[k] = (kk + 1.0) * c[k] / std::pow(d, kk + 1.0); break;
      case KernelKind::sinh:
        out[k] = c[k] * std::exp(std::lgamma(2.0 * kk + 2.0)) / std::pow(d, 2.0 * kk + 1.0);
        break;
      case KernelKind::cosh:
        out[k] = c[k] * std::exp(std::lgamma(2.0 * kk + 1.0)) / std::pow(d, 2.0 * kk);
        break;
      case KernelKind::polynomial:
        if (static_cast<int>(k) > spec.degree) {
          throw hypothesis_violation("b_k > 0 fails at k = " + std::to_string(k), k);
        }
        out[k] = c[k];
        break;
    }
  }
  return out;
}

enum class HPair { base, derivative };

constexpr std::string_view to_string(HPair w) { return w == HPair::base ? "base" : "derivative"; }

/// B/B' (base pair) or B'/B'' (derivative pair) in closed form.
inline double kernel_psi(const KernelSpec& spec, HPair which, double x) {
  const bool base = which == HPair::base;
  const double d = spec.d;
  switch (spec.kind) {
    case KernelKind::exp: return 1.0;
    case KernelKind::geometric: return base ? 1.0 - x : (1.0 - x) / 2.0;
    case KernelKind::recip_pow: return base ? (1.0 - x) / d : (1.0 - x) / (d + 1.0);
    case KernelKind::neglog: return base ? -xlogx(1.0 - d * x) / d : (1.0 - d * x) / d;
    case KernelKind::sinh: return base ? std::tanh(d * x) / d : 1.0 / (d * std::tanh(d * x));
    case KernelKind::cosh: return base ? 1.0 / (d * std::tanh(d * x)) : std::tanh(d * x) / d;
    case KernelKind::polynomial: {
      const int o = base ? 0 : 1;
      const double den = kernel_value(spec, o + 1, x);
      if (den == 0.0) throw singular_point("polynomial kernel derivative vanishes");
      return kernel_value(spec, o, x) / den;
    }
  }
  return 1.0;
}

/// The kernel's closed-form H expression F'(x) psi(x) - F(x), with F = A for
/// the base pair and F = A' for the derivative pair.
class KernelHExpression {
 public:
  KernelHExpression(const KernelSpec& spec, const PowerSeries& a, HPair which,
                    std::size_t n = kDefaultTruncation)
      : spec_(spec), which_(which), f_(which == HPair::base ? a : derivative(a)), df_(f_) {
    const PowerSeries b = make_kernel(spec, std::max(n, a.size()));
    const PowerSeries g = which == HPair::base ? b : derivative(b);
    f_ = reduced_numerator(f_, g);
    df_ = derivative(f_);
  }

  Sample operator()(double x) const {
    const double psi = kernel_psi(spec_, which_, x);
    const double t1 = evaluate(df_, x).value * psi;
    const double t2 = evaluate(f_, x).value;
    return {t1 - t2, std::abs(t1) + std::abs(t2)};
  }

  double radius() const { return std::min(f_.radius(), kernel_radius(spec_)); }

 private:
  KernelSpec spec_;
  HPair which_;
  PowerSeries f_;
  PowerSeries df_;
};

inline double kernel_h_expression(const KernelSpec& spec, const PowerSeries& a, HPair which, double x) {
  return KernelHExpression(spec, a, which)(x).value;
}

/// Limit of the closed-form expression at the right end of (0, r).
inline LimitResult kernel_h_limit(const KernelSpec& spec, const PowerSeries& a, HPair which,
                                  double r, double tol_sign = 1e-8) {
  const KernelHExpression h(spec, a, which);
  LimitResult res = endpoint_limit([&](double x) { return h(x); }, r, h.radius(), tol_sign);
  if (res.method != "interior value") res.method = "kernel closed form, " + res.method;
  return res;
}

}  // namespace psmono
