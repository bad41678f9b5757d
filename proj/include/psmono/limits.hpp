#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "psmono/errors.hpp"

namespace psmono {

enum class Sign { negative = -1, zero = 0, positive = 1 };

constexpr int to_int(Sign s) { return static_cast<int>(s); }
constexpr Sign negate(Sign s) { return static_cast<Sign>(-static_cast<int>(s)); }

constexpr std::string_view to_string(Sign s) {
  switch (s) {
    case Sign::negative: return "negative";
    case Sign::zero: return "zero";
    case Sign::positive: return "positive";
  }
  return "zero";
}

/// Signed value with the tolerance used to call it zero. Infinite limits keep
/// magnitude = +-inf.
struct SignValue {
  Sign sign = Sign::zero;
  double magnitude = 0.0;
  double tolerance = 0.0;

  bool infinite() const { return std::isinf(magnitude); }
  bool positive() const { return sign == Sign::positive; }
  bool negative() const { return sign == Sign::negative; }
  bool zero() const { return sign == Sign::zero; }
};

inline SignValue make_sign(double value, double tolerance) {
  SignValue s{Sign::zero, value, tolerance};
  if (value > tolerance) s.sign = Sign::positive;
  else if (value < -tolerance) s.sign = Sign::negative;
  return s;
}

inline SignValue negate(const SignValue& s) { return {negate(s.sign), -s.magnitude, s.tolerance}; }

/// One sample of an expression: its value and the size of the terms that
/// produced it (the sign tolerance scales with the latter).
struct Sample {
  double value = 0.0;
  double scale = 0.0;
};

struct TracePoint {
  double x = 0.0;
  double value = 0.0;
};

struct LimitResult {
  SignValue value;
  std::string method;
  std::vector<TracePoint> trace;
  bool slow_convergence = false;
  // abscissa from which every sample already carries the sign of the limit
  double stable_from = 0.0;
};

/// Abscissae approaching the right endpoint: r (1 - 2^-j), j = 4..20, keeping
/// only points up to r (1 - 1e-6), or 2^j, j = 0..20 for an infinite endpoint.
inline std::vector<double> endpoint_schedule(double r) {
  std::vector<double> xs;
  if (std::isinf(r)) {
    for (int j = 0; j <= 20; ++j) xs.push_back(std::ldexp(1.0, j));
  } else {
    const double cap = r * (1.0 - 1e-6);
    for (int j = 4; j <= 20; ++j) {
      const double x = r * (1.0 - std::ldexp(1.0, -j));
      if (x <= cap) xs.push_back(x);
    }
  }
  return xs;
}

namespace detail {

inline double sign_tolerance(double tol_sign, double scale) {
  return tol_sign * std::max(1.0, std::isfinite(scale) ? scale : 1.0);
}

inline double stable_from(const std::vector<TracePoint>& trace, Sign s) {
  if (trace.empty()) return 0.0;
  if (s == Sign::zero) return trace.front().x;
  std::size_t i = trace.size();
  while (i > 0) {
    const double v = trace[i - 1].value;
    const bool same = s == Sign::positive ? v > 0.0 : s == Sign::negative ? v < 0.0 : false;
    if (!same) break;
    --i;
  }
  return i < trace.size() ? trace[i].x : trace.back().x;
}

}  // namespace detail

/// Limit of f at the right endpoint r of (0, r), read off the endpoint schedule.
///
/// r inside the convergence radius: f(r) itself. Otherwise the trace is
/// classified as divergent (three growing samples beyond 1e12 of one sign, or
/// non-decaying increments of one sign), convergent (Aitken extrapolation when
/// the increment ratio stays below 0.95), or undetermined.
inline LimitResult endpoint_limit(const std::function<Sample(double)>& f, double r, double radius,
                                  double tol_sign) {
  LimitResult out;
  if (std::isfinite(r) && r < radius * (1.0 - 1e-9)) {
    const Sample s = f(r);
    out.value = make_sign(s.value, detail::sign_tolerance(tol_sign, s.scale));
    out.method = "interior value";
    out.trace.push_back({r, s.value});
    out.stable_from = r;
    return out;
  }

  double last_scale = 0.0;
  for (double x : endpoint_schedule(r)) {
    Sample s;
    try {
      s = f(x);
    } catch (const domain_error&) {
      break;
    } catch (const truncation_error&) {
      break;
    }
    if (std::isnan(s.value)) break;
    out.trace.push_back({x, s.value});
    if (std::isinf(s.value)) break;
    last_scale = s.scale;
  }
  const auto& tr = out.trace;
  if (tr.empty()) throw undetermined_limit("no finite sample of the endpoint trace");

  auto diverged = [&](Sign s) {
    out.value = {s, s == Sign::positive ? std::numeric_limits<double>::infinity()
                                        : -std::numeric_limits<double>::infinity(),
                 0.0};
    out.method = "divergent trace";
    out.stable_from = detail::stable_from(tr, s);
    return out;
  };

  if (std::isinf(tr.back().value)) return diverged(tr.back().value > 0 ? Sign::positive : Sign::negative);

  const std::size_t n = tr.size();
  if (n >= 3) {
    const double v0 = tr[n - 3].value, v1 = tr[n - 2].value, v2 = tr[n - 1].value;
    const bool big = std::abs(v0) > 1e12 && std::abs(v1) > 1e12 && std::abs(v2) > 1e12;
    const bool same = (v0 > 0) == (v1 > 0) && (v1 > 0) == (v2 > 0);
    if (big && same && std::abs(v1) > std::abs(v0) && std::abs(v2) > std::abs(v1)) {
      return diverged(v2 > 0 ? Sign::positive : Sign::negative);
    }
  }

  double limit = tr.back().value;
  out.method = "extrapolated trace";
  if (n >= 3) {
    const double d1 = tr[n - 2].value - tr[n - 3].value;
    const double d2 = tr[n - 1].value - tr[n - 2].value;
    const double noise = 1e-13 * std::max({std::abs(tr[n - 1].value), std::abs(tr[n - 2].value), 1e-300});
    if (std::abs(d2) > noise && std::abs(d1) > noise) {
      const double rho = d2 / d1;
      out.slow_convergence = std::abs(rho) > 0.75;
      if (std::abs(rho) < 0.95) {
        limit += d2 * rho / (1.0 - rho);
      } else if (rho > 0.0) {
        return diverged(d2 > 0 ? Sign::positive : Sign::negative);
      } else {
        throw undetermined_limit("endpoint trace alternates without decay (last increment ratio " +
                                 std::to_string(rho) + ")");
      }
    }
  }
  out.value = make_sign(limit, detail::sign_tolerance(tol_sign, last_scale));
  out.stable_from = detail::stable_from(tr, out.value.sign);
  return out;
}

}  // namespace psmono
