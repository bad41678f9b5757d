#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psmono/errors.hpp"
#include "psmono/limits.hpp"
#include "psmono/series_core.hpp"

namespace psmono {

enum class Direction { constant, increasing, decreasing };

constexpr std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::constant: return "constant";
    case Direction::increasing: return "increasing";
    case Direction::decreasing: return "decreasing";
  }
  return "constant";
}

inline Direction parse_direction(std::string_view s) {
  if (s == "constant") return Direction::constant;
  if (s == "increasing") return Direction::increasing;
  if (s == "decreasing") return Direction::decreasing;
  throw parameter_error("unknown direction '" + std::string(s) + "'");
}

constexpr Direction opposite(Direction d) {
  return d == Direction::increasing   ? Direction::decreasing
         : d == Direction::decreasing ? Direction::increasing
                                      : Direction::constant;
}

/// Sequence indices [start, end]; `unbounded` marks a segment that continues
/// through the tail.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  Direction direction = Direction::constant;
  bool unbounded = false;
};

struct RatioProfile {
  std::vector<double> ratios;              // c_k = a_k / b_k over the stored prefix
  std::optional<double> junction;          // first ratio past the prefix, when the tail gives it
  std::optional<Direction> tail_direction; // absent for a pair of polynomials
  std::vector<Segment> segments;
  std::vector<Segment> constant_runs;      // stretches absorbed into a neighbouring segment
  std::vector<std::size_t> change_indices;
  std::size_t change_count = 0;
  Sign strict_at_zero = Sign::zero;
  Parity parity = Parity::general;
  double tol_const = 1e-12;

  std::optional<std::size_t> m1() const {
    if (change_count == 2) return change_indices[0];
    if (change_count == 1) return change_indices[0];
    return std::nullopt;
  }
  std::optional<std::size_t> m2() const {
    if (change_count == 2) return change_indices[1];
    return std::nullopt;
  }
  Direction first_direction() const { return segments.front().direction; }
};

/// Requires b_k > 0 on the stored prefix and a tail that keeps it positive.
inline void validate_denominator(const PowerSeries& b) {
  const auto c = b.coeffs();
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!(c[k] > 0.0)) throw hypothesis_violation("b_k > 0 fails at k = " + std::to_string(k), k);
  }
  if (std::holds_alternative<GeometricTail>(b.tail())) {
    throw hypothesis_violation("a geometric tail bound does not keep b_k > 0 past k = " +
                                   std::to_string(c.size() - 1),
                               c.size());
  }
  if (const auto* kt = b.kernel_tail()) {
    // f(k) = limit + slope k + delta q^(k-N) must stay positive for every k > N
    const std::size_t n_last = c.size() - 1;
    if (kt->slope < 0.0 || (kt->slope == 0.0 && kt->limit < 0.0) ||
        (kt->slope == 0.0 && kt->limit == 0.0 && kt->delta <= 0.0)) {
      throw hypothesis_violation("kernel tail of the denominator turns non-positive", n_last + 1);
    }
    for (std::size_t j = 1; j < 100000; ++j) {
      const double k = static_cast<double>(n_last + j);
      const double f = kt->limit + kt->slope * k + kt->delta * std::pow(kt->q, static_cast<double>(j));
      if (!(f > 0.0)) {
        throw hypothesis_violation("b_k > 0 fails at k = " + std::to_string(n_last + j), n_last + j);
      }
      const double step = kt->slope - kt->delta * (1.0 - kt->q) * std::pow(kt->q, static_cast<double>(j));
      if (step >= 0.0) break;
    }
  }
}

/// Monotone segmentation of a ratio sequence followed by an optional junction
/// value and a tail moving in `tail` direction.
inline RatioProfile profile_from_ratios(std::vector<double> ratios, std::optional<double> junction,
                                        std::optional<Direction> tail, double tol_const = 1e-12,
                                        Parity parity = Parity::general) {
  if (ratios.empty()) throw insufficient_data("empty ratio sequence");
  RatioProfile p;
  p.ratios = std::move(ratios);
  p.junction = junction;
  p.tail_direction = tail;
  p.tol_const = tol_const;
  p.parity = parity;

  std::vector<double> seq = p.ratios;
  if (junction) seq.push_back(*junction);
  std::vector<int> steps;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const double d = seq[i + 1] - seq[i];
    steps.push_back(std::abs(d) <= tol_const ? 0 : (d > 0 ? 1 : -1));
  }
  const bool open_tail = tail && *tail != Direction::constant;
  if (open_tail) steps.push_back(*tail == Direction::increasing ? 1 : -1);

  auto dir_of = [](int s) { return s > 0 ? Direction::increasing : Direction::decreasing; };
  const std::size_t last = seq.size() - 1;

  int current = 0;
  std::size_t seg_start = 0;
  constexpr std::size_t no_run = static_cast<std::size_t>(-1);
  std::size_t run_start = no_run;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const int s = steps[i];
    if (s == 0) {
      if (run_start == no_run) run_start = i;
      continue;
    }
    if (run_start != no_run) {
      p.constant_runs.push_back({run_start, i, Direction::constant, false});
      run_start = no_run;
    }
    if (current == 0) {
      current = s;
    } else if (s != current) {
      p.segments.push_back({seg_start, i, dir_of(current), false});
      p.change_indices.push_back(i);
      seg_start = i;
      current = s;
    }
  }
  if (run_start != no_run) p.constant_runs.push_back({run_start, last, Direction::constant, false});
  p.segments.push_back({seg_start, last, current == 0 ? Direction::constant : dir_of(current), open_tail});

  p.change_count = p.change_indices.size();
  if (!steps.empty()) p.strict_at_zero = static_cast<Sign>(steps.front());
  return p;
}

namespace detail {

inline bool pure_kernel_tail(const KernelTail& t) {
  return t.slope == 0.0 && t.delta == 0.0 && t.limit > 0.0;
}

inline Direction sign_direction(double v) {
  return v > 0 ? Direction::increasing : v < 0 ? Direction::decreasing : Direction::constant;
}

inline std::vector<double> divide(const PowerSeries& a, const PowerSeries& b, std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = a.coefficient(k) / b.coefficient(k);
  return c;
}

inline void check_declared(const std::optional<Direction>& declared, Direction found) {
  if (declared && *declared != found) {
    throw hypothesis_violation("declared tail direction " + std::string(to_string(*declared)) +
                               " contradicts the tail, which is " + std::string(to_string(found)));
  }
}

}  // namespace detail

/// Ratio profile of a / b. The tail direction comes from the tails themselves
/// when they determine it, and from `declared` otherwise.
inline RatioProfile build_profile(const PowerSeries& a, const PowerSeries& b, double tol_const = 1e-12,
                                  std::optional<Direction> declared = std::nullopt) {
  validate_denominator(b);
  if (a.parity() != b.parity()) {
    throw hypothesis_violation("numerator and denominator use different slot layouts (" +
                               std::string(to_string(a.parity())) + " vs " +
                               std::string(to_string(b.parity())) + ")");
  }
  const Parity par = a.parity();

  if (b.is_finite()) {
    if (!a.is_finite()) {
      throw hypothesis_violation("denominator is a polynomial but the numerator has an infinite tail");
    }
    for (std::size_t k = b.size(); k < a.size(); ++k) {
      if (a.coeffs()[k] != 0.0) {
        throw hypothesis_violation("b_k > 0 fails at k = " + std::to_string(k), k);
      }
    }
    return profile_from_ratios(detail::divide(a, b, b.size()), std::nullopt, std::nullopt, tol_const, par);
  }

  const KernelTail& tb = *b.kernel_tail();
  std::size_t n = std::max(a.size(), b.size());
  if (n < 2) throw insufficient_data("need at least two stored ratios ahead of an infinite tail");

  if (a.is_finite()) {
    detail::check_declared(declared, Direction::constant);
    return profile_from_ratios(detail::divide(a, b, n), 0.0, Direction::constant, tol_const, par);
  }

  const KernelTail* ta = a.kernel_tail();
  if (ta && detail::pure_kernel_tail(tb) && ta->kernel == tb.kernel && ta->order == tb.order) {
    // past the prefix c_k = (L + S k + D q^(k-N)) / L_b; steps S - D (1-q) q^j
    const PowerSeries ae = extended(a, n);
    const KernelTail& t = *ae.kernel_tail();
    const Direction slope_dir = detail::sign_direction(t.slope);
    const Direction delta_dir = detail::sign_direction(-t.delta);
    Direction dir = slope_dir == Direction::constant ? delta_dir : slope_dir;
    if (slope_dir != Direction::constant && delta_dir != Direction::constant && slope_dir != delta_dir) {
      // the geometric part eventually falls below the linear part
      const double j_star = std::log(std::abs(t.slope) / (std::abs(t.delta) * (1.0 - t.q))) / std::log(t.q);
      const double extra = std::max(0.0, std::ceil(j_star));
      if (extra > 4096.0) throw insufficient_data("kernel tail changes direction too far out");
      n += static_cast<std::size_t>(extra);
    }
    detail::check_declared(declared, dir);
    return profile_from_ratios(detail::divide(a, b, n), a.coefficient(n) / b.coefficient(n), dir,
                               tol_const, par);
  }

  if (!declared) {
    throw insufficient_data("the tail direction of the ratio sequence must be declared for this numerator");
  }
  if (std::holds_alternative<GeometricTail>(a.tail())) n = a.size();
  return profile_from_ratios(detail::divide(a, b, n), std::nullopt, declared, tol_const, par);
}

/// The profile of {c_{k+s}}: the same sequence with its first s entries dropped.
inline RatioProfile shifted(const RatioProfile& p, std::size_t s) {
  if (s == 0) return p;
  if (s >= p.ratios.size()) {
    // only the tail is left; its value does not matter, its direction does
    if (!p.tail_direction) throw insufficient_data("shift past the stored ratio prefix");
    return profile_from_ratios({p.junction.value_or(p.ratios.back())}, std::nullopt, p.tail_direction, p.tol_const,
                               p.parity);
  }
  std::vector<double> rest(p.ratios.begin() + static_cast<std::ptrdiff_t>(s), p.ratios.end());
  return profile_from_ratios(std::move(rest), p.junction, p.tail_direction, p.tol_const, p.parity);
}

/// Profile of {a_{k+1} / b_{k+1}}.
inline RatioProfile shift_profile(const PowerSeries& a, const PowerSeries& b, double tol_const = 1e-12,
                                  std::optional<Direction> declared = std::nullopt) {
  return shifted(build_profile(a, b, tol_const, declared), 1);
}

}  // namespace psmono
