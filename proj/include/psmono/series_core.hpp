#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "psmono/errors.hpp"
#include "psmono/kernel_functions.hpp"
#include "psmono/layout.hpp"
#include "psmono/special.hpp"

namespace psmono {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kDefaultTruncation = 64;

/// Polynomial: every coefficient past the stored prefix is zero.
struct FiniteTail {};

/// Declared decay |c_{k+1}| <= rho |c_k| for every k from the last stored index on.
struct GeometricTail {
  double rho = 0.0;
};

/// Coefficients past the stored prefix follow a kernel:
///
///   c_k = beta_k * (limit + slope * k + delta * q^(k - N)),   k > N,
///
/// where beta_k is slot k of the order-th derivative of the kernel and N is the
/// last stored index. The kernel itself is limit = 1 with slope = delta = 0.
struct KernelTail {
  KernelSpec kernel;
  int order = 0;
  double limit = 1.0;
  double slope = 0.0;
  double delta = 0.0;
  double q = 0.5;
};

using Tail = std::variant<FiniteTail, GeometricTail, KernelTail>;

struct Evaluation {
  double value = 0.0;
  double error_bound = 0.0;
};

/// Truncated real power series sum_k c_k x^(offset + stride k).
class PowerSeries {
 public:
  explicit PowerSeries(std::vector<double> coeffs, Tail tail = FiniteTail{}, double radius = kInf,
                       Parity parity = Parity::general)
      : coeffs_(std::move(coeffs)), tail_(std::move(tail)), radius_(radius), parity_(parity) {
    if (coeffs_.empty()) throw parameter_error("power series needs at least one coefficient");
    if (!(radius_ > 0.0)) throw parameter_error("power series radius must be positive");
    if (const auto* g = std::get_if<GeometricTail>(&tail_)) {
      if (!(g->rho >= 0.0 && std::isfinite(g->rho))) {
        throw parameter_error("geometric tail needs a finite rho >= 0");
      }
    }
    if (const auto* kt = std::get_if<KernelTail>(&tail_)) {
      validate_kernel(kt->kernel);
      if (kt->kernel.kind == KernelKind::polynomial) {
        throw parameter_error("polynomial kernel has no infinite tail");
      }
      if (derivative_parity(kernel_parity(kt->kernel), kt->order) != parity_) {
        throw hypothesis_violation("series parity does not match its kernel tail");
      }
      if (kt->delta != 0.0 && !(kt->q > 0.0 && kt->q < 1.0)) {
        throw parameter_error("kernel tail needs 0 < q < 1");
      }
      radius_ = std::min(radius_, kernel_radius(kt->kernel));
      betas_.resize(coeffs_.size());
      betas_[0] = kernel_slot_coefficient(kt->kernel, kt->order, 0);
      for (std::size_t k = 1; k < betas_.size(); ++k) {
        betas_[k] = betas_[k - 1] * kernel_slot_ratio(kt->kernel, kt->order, k - 1);
      }
    }
  }

  std::span<const double> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  const Tail& tail() const { return tail_; }
  double radius() const { return radius_; }
  Parity parity() const { return parity_; }

  bool is_finite() const { return std::holds_alternative<FiniteTail>(tail_); }
  const KernelTail* kernel_tail() const { return std::get_if<KernelTail>(&tail_); }

  /// Kernel slot coefficients beta_0..beta_N (kernel tails only).
  std::span<const double> kernel_betas() const { return betas_; }

  /// Coefficient of slot k, following the tail past the stored prefix.
  double coefficient(std::size_t k) const {
    if (k < coeffs_.size()) return coeffs_[k];
    return std::visit(
        [&](const auto& t) -> double {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, FiniteTail>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, GeometricTail>) {
            throw truncation_error("coefficient " + std::to_string(k) +
                                   " lies past the stored prefix of a geometric-tail series");
          } else {
            const double n_last = static_cast<double>(coeffs_.size() - 1);
            const double kk = static_cast<double>(k);
            const double ratio = t.limit + t.slope * kk +
                                 (t.delta == 0.0 ? 0.0 : t.delta * std::pow(t.q, kk - n_last));
            return kernel_slot_coefficient(t.kernel, t.order, k) * ratio;
          }
        },
        tail_);
  }

 private:
  std::vector<double> coeffs_;
  Tail tail_;
  double radius_;
  Parity parity_;
  std::vector<double> betas_;
};

namespace detail {

struct HornerSum {
  double value = 0.0;
  double magnitude = 0.0;
};

// sum_k w_k c_k x^(e_k) with w_k = 1 or k.
inline HornerSum horner(std::span<const double> c, Parity p, double x, bool weight_by_index) {
  const double t = parity_stride(p) == 2 ? x * x : x;
  HornerSum h;
  for (std::size_t i = c.size(); i-- > 0;) {
    const double ci = weight_by_index ? static_cast<double>(i) * c[i] : c[i];
    h.value = h.value * t + ci;
    h.magnitude = h.magnitude * t + std::abs(ci);
  }
  if (parity_offset(p) == 1) {
    h.value *= x;
    h.magnitude *= x;
  }
  return h;
}

inline double slot_power(Parity p, std::size_t k, double x) {
  return std::pow(x, static_cast<double>(slot_exponent(p, k)));
}

// limit * R0 + slope * R1 + delta * Rq for the part of the series past slot N.
inline Evaluation kernel_tail_sum(const KernelTail& kt, std::span<const double> betas, Parity p,
                                  double x) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const std::size_t n_last = betas.size() - 1;
  const int off = parity_offset(p);
  const int stride = parity_stride(p);
  Evaluation out;

  if (kt.limit != 0.0 || kt.slope != 0.0) {
    const double k0 = kernel_value(kt.kernel, kt.order, x);
    const HornerSum p0 = horner(betas, p, x, false);
    if (kt.limit != 0.0) {
      out.value += kt.limit * (k0 - p0.value);
      out.error_bound += 4.0 * eps * std::abs(kt.limit) * (std::abs(k0) + p0.magnitude);
    }
    if (kt.slope != 0.0) {
      // sum_k k beta_k x^(off + stride k) = (x K'(x) - off K(x)) / stride
      const double k1 = kernel_value(kt.kernel, kt.order + 1, x);
      const double full = (x * k1 - off * k0) / stride;
      const HornerSum p1 = horner(betas, p, x, true);
      out.value += kt.slope * (full - p1.value);
      out.error_bound +=
          4.0 * eps * std::abs(kt.slope) * (std::abs(x * k1) + std::abs(k0) + p1.magnitude);
    }
  }

  if (kt.delta != 0.0) {
    const double t = stride == 2 ? x * x : x;
    const double beta_last = betas[n_last];
    const double first_ratio = kernel_slot_ratio(kt.kernel, kt.order, n_last) * t * kt.q;
    const double asymptotic = kernel_asymptotic_ratio(kt.kernel, t) * kt.q;
    bool summed = false;
    if (beta_last != 0.0 && std::max(first_ratio, asymptotic) < 0.9) {
      // direct summation: terms q^(k-N) beta_k x^(e_k), k > N
      double term = kt.q * beta_last * kernel_slot_ratio(kt.kernel, kt.order, n_last) *
                    slot_power(p, n_last + 1, x);
      double sum = 0.0;
      double ratio = first_ratio;
      std::size_t k = n_last + 1;
      for (int iter = 0; iter < 4000; ++iter) {
        sum += term;
        ratio = kernel_slot_ratio(kt.kernel, kt.order, k) * t * kt.q;
        const double rho = std::max(ratio, asymptotic);
        term *= ratio;
        ++k;
        if (rho < 1.0 && std::abs(term) / (1.0 - rho) <= 1e-18 * std::abs(sum)) {
          summed = true;
          out.error_bound += std::abs(kt.delta) * (std::abs(term) / (1.0 - rho) +
                                                   2.0 * eps * iter * std::abs(sum));
          break;
        }
        if (term == 0.0) {
          summed = true;
          break;
        }
      }
      if (summed) out.value += kt.delta * sum;
    }
    if (!summed) {
      // q^(-N - off/stride) (K(y) - P0(y)),  y = q^(1/stride) x
      const double y = std::pow(kt.q, 1.0 / stride) * x;
      const double scale =
          std::exp(-(static_cast<double>(n_last) + static_cast<double>(off) / stride) * std::log(kt.q));
      const double ky = kernel_value(kt.kernel, kt.order, y);
      const HornerSum py = horner(betas, p, y, false);
      out.value += kt.delta * scale * (ky - py.value);
      out.error_bound += 4.0 * eps * std::abs(kt.delta) * scale * (std::abs(ky) + py.magnitude);
    }
  }
  return out;
}

}  // namespace detail

/// Sum of the series at x in (0, radius), with a bound on truncation plus rounding.
inline Evaluation evaluate(const PowerSeries& s, double x) {
  if (!(x > 0.0) || !(x < s.radius())) {
    throw domain_error("evaluation point " + std::to_string(x) + " outside (0, " +
                       std::to_string(s.radius()) + ")");
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const auto c = s.coeffs();
  const detail::HornerSum h = detail::horner(c, s.parity(), x, false);
  Evaluation out{h.value, 2.0 * static_cast<double>(c.size()) * eps * h.magnitude};

  if (const auto* g = std::get_if<GeometricTail>(&s.tail())) {
    const double t = parity_stride(s.parity()) == 2 ? x * x : x;
    const double ratio = g->rho * t;
    if (!(ratio < 1.0)) {
      throw truncation_error("geometric tail bound rho * x = " + std::to_string(ratio) +
                             " is not below 1");
    }
    const double last = std::abs(c.back()) * detail::slot_power(s.parity(), c.size() - 1, x);
    out.error_bound += last * ratio / (1.0 - ratio);
  } else if (const auto* kt = s.kernel_tail()) {
    const Evaluation tail = detail::kernel_tail_sum(*kt, s.kernel_betas(), s.parity(), x);
    out.value += tail.value;
    out.error_bound += tail.error_bound;
  }
  return out;
}

/// Copy of s with at least n stored coefficients (finite and kernel tails only).
inline PowerSeries extended(const PowerSeries& s, std::size_t n) {
  if (n <= s.size()) return s;
  if (std::holds_alternative<GeometricTail>(s.tail())) {
    throw insufficient_data("cannot extend a geometric-tail series past its stored prefix");
  }
  std::vector<double> c(s.coeffs().begin(), s.coeffs().end());
  for (std::size_t k = s.size(); k < n; ++k) c.push_back(s.coefficient(k));
  Tail tail = s.tail();
  if (auto* kt = std::get_if<KernelTail>(&tail)) {
    kt->delta *= std::pow(kt->q, static_cast<double>(n - s.size()));
  }
  return PowerSeries(std::move(c), tail, s.radius(), s.parity());
}

/// Termwise derivative.
inline PowerSeries derivative(const PowerSeries& s0) {
  const Parity p = s0.parity();
  const bool drop = derivative_drops_slot(p);
  const PowerSeries s = (drop && s0.size() < 2 && s0.kernel_tail()) ? extended(s0, 2) : s0;
  const auto c = s.coeffs();

  std::vector<double> out;
  out.reserve(c.size());
  for (std::size_t k = drop ? 1 : 0; k < c.size(); ++k) {
    out.push_back(static_cast<double>(slot_exponent(p, k)) * c[k]);
  }

  Tail tail = s.tail();
  if (auto* g = std::get_if<GeometricTail>(&tail)) {
    const int e_last = slot_exponent(p, c.size() - 1);
    if (e_last == 0) {
      throw truncation_error("cannot bound the derivative tail of a one-term geometric series");
    }
    g->rho *= static_cast<double>(e_last + parity_stride(p)) / e_last;
  } else if (auto* kt = std::get_if<KernelTail>(&tail)) {
    kt->order += 1;
    if (drop) kt->limit += kt->slope;
  }

  if (out.empty()) return PowerSeries({0.0}, FiniteTail{}, s.radius(), derivative_parity(p));
  return PowerSeries(std::move(out), tail, s.radius(), derivative_parity(p));
}

inline PowerSeries nth_derivative(PowerSeries s, int order) {
  for (int i = 0; i < order; ++i) s = derivative(s);
  return s;
}

/// Coefficients c_k = values[k] / k! from derivative values at 0.
inline PowerSeries coeffs_from_derivatives(std::span<const double> values, Tail tail = FiniteTail{},
                                           double radius = kInf) {
  if (values.empty()) throw parameter_error("derivative list is empty");
  std::vector<double> c(values.size());
  double factorial = 1.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) factorial *= static_cast<double>(k);
    c[k] = values[k] / factorial;
  }
  return PowerSeries(std::move(c), std::move(tail), radius);
}

/// s multiplied by a constant.
inline PowerSeries scaled(const PowerSeries& s, double factor) {
  std::vector<double> c(s.coeffs().begin(), s.coeffs().end());
  for (double& v : c) v *= factor;
  Tail tail = s.tail();
  if (auto* kt = std::get_if<KernelTail>(&tail)) {
    kt->limit *= factor;
    kt->slope *= factor;
    kt->delta *= factor;
  }
  return PowerSeries(std::move(c), tail, s.radius(), s.parity());
}

/// Copy of a kernel-tail series cut back to m stored coefficients, when the
/// dropped ones already follow the tail; nullopt otherwise.
inline std::optional<PowerSeries> truncated(const PowerSeries& s, std::size_t m) {
  const auto* kt = s.kernel_tail();
  if (!kt || m == 0 || m > s.size()) return std::nullopt;
  if (m == s.size()) return s;
  KernelTail t = *kt;
  t.delta = kt->delta * std::pow(kt->q, -static_cast<double>(s.size() - m));
  const PowerSeries cut(std::vector<double>(s.coeffs().begin(), s.coeffs().begin() + static_cast<std::ptrdiff_t>(m)),
                        t, s.radius(), s.parity());
  for (std::size_t k = m; k < s.size(); ++k) {
    const double want = cut.coefficient(k);
    if (std::abs(want - s.coeffs()[k]) > 1e-11 * std::abs(s.coeffs()[k])) return std::nullopt;
  }
  return cut;
}

/// f - lambda g when the two tails can be combined exactly; nullopt otherwise.
/// The part of the result past the shorter stored prefix comes from the
/// combined tail, so no coefficient is formed as a difference of two nearly
/// equal numbers there.
inline std::optional<PowerSeries> subtract_multiple(const PowerSeries& f0, double lambda,
                                                    const PowerSeries& g0) {
  if (f0.parity() != g0.parity()) return std::nullopt;
  if (std::holds_alternative<GeometricTail>(f0.tail()) ||
      std::holds_alternative<GeometricTail>(g0.tail())) {
    return std::nullopt;
  }
  const auto* kf = f0.kernel_tail();
  const auto* kg = g0.kernel_tail();
  if (kf && kg && (kf->kernel != kg->kernel || kf->order != kg->order)) return std::nullopt;

  PowerSeries f = f0, g = g0;
  const std::size_t m = std::min(f.size(), g.size());
  if (f.size() > m && kf) {
    if (auto t = truncated(f, m)) f = *t;
  }
  if (g.size() > m && kg) {
    if (auto t = truncated(g, m)) g = *t;
  }

  const std::size_t n = std::max(f.size(), g.size());
  const PowerSeries fe = extended(f, n);
  const PowerSeries ge = extended(g, n);
  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = fe.coeffs()[k] - lambda * ge.coeffs()[k];
  const double radius = std::min(f.radius(), g.radius());

  if (!kf && !kg) return PowerSeries(std::move(c), FiniteTail{}, radius, f.parity());

  KernelTail tf = kf ? *fe.kernel_tail() : KernelTail{kg->kernel, kg->order, 0.0, 0.0, 0.0, 0.5};
  KernelTail tg = kg ? *ge.kernel_tail() : KernelTail{kf->kernel, kf->order, 0.0, 0.0, 0.0, 0.5};
  KernelTail out = tf;
  out.limit = tf.limit - lambda * tg.limit;
  out.slope = tf.slope - lambda * tg.slope;
  if (tg.delta == 0.0) {
    out.delta = tf.delta;
    out.q = tf.q;
  } else if (tf.delta == 0.0) {
    out.delta = -lambda * tg.delta;
    out.q = tg.q;
  } else if (tf.q == tg.q) {
    out.delta = tf.delta - lambda * tg.delta;
  } else {
    return std::nullopt;
  }
  return PowerSeries(std::move(c), out, radius, f.parity());
}

/// F - lambda G with lambda chosen to cancel the common growth of the two
/// series; H_{F - lambda G, G} = H_{F, G}, so H can be evaluated on the
/// reduced numerator without the cancellation between F'G/G' and F.
inline PowerSeries reduced_numerator(const PowerSeries& f, const PowerSeries& g) {
  double lambda = 0.0;
  const auto* kf = f.kernel_tail();
  const auto* kg = g.kernel_tail();
  if (kf && kg) {
    if (kg->limit == 0.0) return f;
    lambda = kf->limit / kg->limit;
  } else if (!kf && !kg && f.is_finite() && g.is_finite()) {
    const std::size_t n = std::min(f.size(), g.size());
    if (g.coeffs()[n - 1] == 0.0) return f;
    lambda = f.coeffs()[n - 1] / g.coeffs()[n - 1];
  } else {
    return f;
  }
  if (lambda == 0.0) return f;
  auto r = subtract_multiple(f, lambda, g);
  return r ? *r : f;
}

}  // namespace psmono
