#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psmono/errors.hpp"
#include "psmono/kernels.hpp"
#include "psmono/limits.hpp"
#include "psmono/series_core.hpp"

namespace psmono {

/// H_{F,G}(x) = F'(x)/G'(x) G(x) - F(x), evaluated on the reduced numerator
/// F - lambda G (same H, smaller terms).
class HFunction {
 public:
  HFunction(const PowerSeries& f, const PowerSeries& g)
      : f_(reduced_numerator(f, g)), g_(g), df_(derivative(f_)), dg_(derivative(g)) {}

  Sample sample(double x) const {
    const Evaluation dg = evaluate(dg_, x);
    if (dg.value == 0.0 || (std::isfinite(dg.value) && std::abs(dg.value) <= dg.error_bound)) {
      throw singular_point("G'(" + std::to_string(x) + ") vanishes");
    }
    const double t1 = evaluate(df_, x).value / dg.value * evaluate(g_, x).value;
    const double t2 = evaluate(f_, x).value;
    return {t1 - t2, std::abs(t1) + std::abs(t2)};
  }

  double operator()(double x) const { return sample(x).value; }

  double radius() const { return std::min(f_.radius(), g_.radius()); }

 private:
  PowerSeries f_;
  PowerSeries g_;
  PowerSeries df_;
  PowerSeries dg_;
};

inline double h_value(const PowerSeries& f, const PowerSeries& g, double x) {
  return HFunction(f, g)(x);
}

/// H_{A,B}(0+) = b_0 (a_1/b_1 - a_0/b_0), on the stored slots.
inline SignValue h_at_zero(const PowerSeries& a, const PowerSeries& b, double tol_sign = 1e-8) {
  const double b0 = b.coefficient(0);
  const double b1 = b.coefficient(1);
  if (!(b0 > 0.0)) throw hypothesis_violation("b_k > 0 fails at k = 0", 0);
  if (!(b1 > 0.0)) throw hypothesis_violation("b_k > 0 fails at k = 1", 1);
  const double a0 = a.coefficient(0);
  const double a1 = a.coefficient(1);
  const double v = b0 * (a1 / b1 - a0 / b0);
  return make_sign(v, tol_sign * std::max(1.0, std::abs(b0 * a1 / b1) + std::abs(a0)));
}

struct EndpointSignature {
  SignValue h_at_zero;
  SignValue h_at_end;
  SignValue h_deriv_at_end;
  std::string method;  // "kernel closed form" or "sampled extrapolation"
  LimitResult end_detail;
  LimitResult deriv_detail;
};

/// Limit of H_{F,G} at the right end of (0, r) by sampling the generic definition.
inline LimitResult h_endpoint_limit(const PowerSeries& f, const PowerSeries& g, double r,
                                    double tol_sign = 1e-8) {
  const HFunction h(f, g);
  return endpoint_limit([&](double x) { return h.sample(x); }, r, h.radius(), tol_sign);
}

/// Signs of H_{A,B}(0+), H_{A,B}(r-) and H_{A',B'}(r-). Kernel denominators use
/// the closed-form expressions; anything else is sampled.
inline EndpointSignature endpoint_signature(const PowerSeries& a, const PowerSeries& b,
                                            const std::optional<KernelSpec>& kernel, double r,
                                            double tol_sign = 1e-8) {
  EndpointSignature sig;
  sig.h_at_zero = h_at_zero(a, b, tol_sign);
  if (kernel && kernel->kind != KernelKind::polynomial) {
    sig.method = "kernel closed form";
    sig.end_detail = kernel_h_limit(*kernel, a, HPair::base, r, tol_sign);
    sig.deriv_detail = kernel_h_limit(*kernel, a, HPair::derivative, r, tol_sign);
  } else {
    sig.method = "sampled extrapolation";
    sig.end_detail = h_endpoint_limit(a, b, r, tol_sign);
    sig.deriv_detail = h_endpoint_limit(derivative(a), derivative(b), r, tol_sign);
  }
  sig.h_at_end = sig.end_detail.value;
  sig.h_deriv_at_end = sig.deriv_detail.value;
  return sig;
}

struct IdentityReport {
  std::size_t points = 0;
  double quotient_deviation = 0.0;  // (F/G)' vs (G'/G^2) H
  double h_deviation = 0.0;         // H' vs (F'/G')' G
};

namespace detail {

inline double max_relative_deviation(std::span<const double> lhs, std::span<const double> rhs) {
  double scale = 0.0;
  for (double v : rhs) scale = std::max(scale, std::abs(v));
  const double floor = std::max(1e-3 * scale, std::numeric_limits<double>::min());
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double diff = std::abs(lhs[i] - rhs[i]);
    if (diff == 0.0) continue;
    worst = std::max(worst, diff / std::max(std::abs(rhs[i]), floor));
  }
  return worst;
}

/// Five-point central difference, O(step^4).
template <class F>
double central_difference(F&& fn, double x, double step) {
  return (fn(x - 2.0 * step) - 8.0 * fn(x - step) + 8.0 * fn(x + step) - fn(x + 2.0 * step)) / (12.0 * step);
}

}  // namespace detail

/// Compares five-point central differences (step `step`) of F/G and of H_{F,G} against the
/// right-hand sides of the two identities at each x. Both identities are
/// unchanged by F -> F - lambda G, so the reduced numerator is used throughout.
inline IdentityReport check_identities(const PowerSeries& f0, const PowerSeries& g,
                                       std::span<const double> xs, double step = 1e-5) {
  const PowerSeries f = reduced_numerator(f0, g);
  const HFunction h(f, g);
  const PowerSeries df = derivative(f), dg = derivative(g);
  const PowerSeries ddf = derivative(df), ddg = derivative(dg);
  auto ev = [](const PowerSeries& s, double x) { return evaluate(s, x).value; };

  std::vector<double> l1, r1, l2, r2;
  for (double x : xs) {
    const double gx = ev(g, x), dgx = ev(dg, x);
    l1.push_back(detail::central_difference([&](double t) { return ev(f, t) / ev(g, t); }, x, step));
    r1.push_back(dgx / (gx * gx) * h(x));

    l2.push_back(detail::central_difference(h, x, step));
    const double dfx = ev(df, x);
    const double q_prime = (ev(ddf, x) * dgx - dfx * ev(ddg, x)) / (dgx * dgx);
    r2.push_back(q_prime * gx);
  }
  IdentityReport rep;
  rep.points = xs.size();
  rep.quotient_deviation = detail::max_relative_deviation(l1, r1);
  rep.h_deviation = detail::max_relative_deviation(l2, r2);
  return rep;
}

}  // namespace psmono
