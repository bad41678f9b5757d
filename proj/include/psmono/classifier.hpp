#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psmono/errors.hpp"
#include "psmono/grid.hpp"
#include "psmono/h_engine.hpp"
#include "psmono/kernels.hpp"
#include "psmono/limits.hpp"
#include "psmono/ratio_profile.hpp"
#include "psmono/series_core.hpp"
#include "psmono/turning_points.hpp"

namespace psmono {

enum class Shape { constant, inc, dec, inc_dec, dec_inc, inc_dec_inc, dec_inc_dec, bound_only };

constexpr std::string_view to_string(Shape s) {
  switch (s) {
    case Shape::constant: return "constant";
    case Shape::inc: return "inc";
    case Shape::dec: return "dec";
    case Shape::inc_dec: return "inc-dec";
    case Shape::dec_inc: return "dec-inc";
    case Shape::inc_dec_inc: return "inc-dec-inc";
    case Shape::dec_inc_dec: return "dec-inc-dec";
    case Shape::bound_only: return "bound-only";
  }
  return "constant";
}

inline Shape parse_shape(std::string_view s) {
  for (auto v : {Shape::constant, Shape::inc, Shape::dec, Shape::inc_dec, Shape::dec_inc,
                 Shape::inc_dec_inc, Shape::dec_inc_dec, Shape::bound_only}) {
    if (to_string(v) == s) return v;
  }
  throw parameter_error("unknown shape '" + std::string(s) + "'");
}

constexpr std::size_t turning_point_count(Shape s) {
  switch (s) {
    case Shape::inc_dec:
    case Shape::dec_inc: return 1;
    case Shape::inc_dec_inc:
    case Shape::dec_inc_dec: return 2;
    default: return 0;
  }
}

constexpr Shape mirror(Shape s) {
  switch (s) {
    case Shape::inc: return Shape::dec;
    case Shape::dec: return Shape::inc;
    case Shape::inc_dec: return Shape::dec_inc;
    case Shape::dec_inc: return Shape::inc_dec;
    case Shape::inc_dec_inc: return Shape::dec_inc_dec;
    case Shape::dec_inc_dec: return Shape::inc_dec_inc;
    default: return s;
  }
}

/// Which rule produced a verdict: monotone ratio sequence, one change, two
/// changes, or more (counting bound only).
enum class Rule { zero_change, one_change, two_change, count_bound };

constexpr std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::zero_change: return "MR1";
    case Rule::one_change: return "MR5";
    case Rule::two_change: return "MR-two-change";
    case Rule::count_bound: return "count-bound";
  }
  return "MR1";
}

struct MonotonicityPattern {
  Shape shape = Shape::constant;
  std::vector<RootBracket> turning_points;
  std::optional<std::size_t> change_bound;
};

/// A numeric condition the classifier tested, e.g. "H_end" with its value.
struct Condition {
  std::string name;
  double value = 0.0;
  Sign sign = Sign::zero;
};

/// Sign survey of H on the composite grid.
struct HScan {
  std::size_t points = 0;
  std::optional<double> first_negative;  // first x with H(x) < -tol
  std::optional<double> first_positive;
  double value_at_first_negative = 0.0;
  double value_at_first_positive = 0.0;
  double min_value = 0.0;
  double max_value = 0.0;
  double min_abs = 0.0;

  bool certified_nonnegative() const { return !first_negative; }
  bool certified_nonpositive() const { return !first_positive; }
};

struct ClassifierConfig {
  double tol_sign = 1e-8;
  double tol_const = 1e-12;
  double tol_bisect = 1e-9;  // relative to r, or to x_max on (0, inf)
  std::size_t grid = 4096;
};

/// Numerator and denominator with the interval and optional kernel and tail
/// direction declarations.
struct RatioProblem {
  PowerSeries a;
  PowerSeries b;
  std::optional<KernelSpec> kernel;
  double r = kInf;
  std::optional<Direction> tail_direction;
};

struct ClassificationReport {
  RatioProfile profile;
  MonotonicityPattern pattern;
  Rule rule = Rule::zero_change;
  std::optional<int> row;  // two-change table row 1..10
  std::optional<EndpointSignature> signature;
  std::optional<double> witness_x0;
  std::vector<Condition> conditions;
  std::vector<int> candidate_rows;
  bool tie = false;
  bool grid_certified = false;
  std::string note;
  double x_max = 0.0;  // right end of the sampled interval
  std::optional<HScan> scan;

  std::optional<std::string> branch() const {
    if (!row) return std::nullopt;
    static constexpr const char* names[] = {"i", "ii", "iii", "iv", "v"};
    return std::string(names[(*row - 1) % 5]);
  }
};

inline double sampling_extent(const RatioProblem& p, const std::optional<EndpointSignature>& sig) {
  if (std::isfinite(p.r)) return p.r * (1.0 - 1e-6);
  double stable = 0.0;
  if (sig) stable = std::max(sig->end_detail.stable_from, sig->deriv_detail.stable_from);
  return std::max(16.0, 8.0 * stable);
}

/// H on the composite grid over (0, end]: first strict witnesses of each sign
/// and the range of values seen.
inline HScan scan_h_sign(const std::function<Sample(double)>& h, double end, std::size_t grid_size,
                         double tol_sign = 1e-8) {
  if (grid_size < 2) throw parameter_error("scan grid needs at least 2 points");
  HScan out;
  bool first = true;
  for (double x : composite_grid(end, grid_size)) {
    const Sample s = h(x);
    const SignValue sv = make_sign(s.value, tol_sign * std::max(1.0, s.scale));
    ++out.points;
    if (first) {
      out.min_value = out.max_value = s.value;
      out.min_abs = std::abs(s.value);
      first = false;
    }
    out.min_value = std::min(out.min_value, s.value);
    out.max_value = std::max(out.max_value, s.value);
    out.min_abs = std::min(out.min_abs, std::abs(s.value));
    if (sv.negative() && !out.first_negative) {
      out.first_negative = x;
      out.value_at_first_negative = s.value;
    }
    if (sv.positive() && !out.first_positive) {
      out.first_positive = x;
      out.value_at_first_positive = s.value;
    }
  }
  return out;
}

inline HScan scan_h_sign(const PowerSeries& f, const PowerSeries& g, double end, std::size_t grid_size,
                         double tol_sign = 1e-8) {
  const HFunction h(f, g);
  return scan_h_sign([&](double x) { return h.sample(x); }, end, grid_size, tol_sign);
}

struct TwoChangeVerdict {
  Shape shape = Shape::inc;
  int row = 1;
  std::vector<int> candidate_rows;
  bool tie = false;
  bool grid_certified = false;
  std::optional<double> witness_x0;
  std::optional<HScan> scan;
};

/// Two-change table. Rows 1-5 apply to an inc-dec-inc ratio sequence, with
/// (sign H(r-), sign H_{A',B'}(r-)):
///
///   1  >= 0, <= 0                         inc
///   2  >  0, >  0, H >= 0 on (0, r)       inc
///   3  <  0, <= 0                         inc-dec
///   4  <= 0, >  0                         inc-dec
///   5  >= 0, >  0, H(x0) < 0 somewhere    inc-dec-inc
///
/// Rows 6-10 are rows 1-5 for dec-inc-dec with every inequality reversed. A
/// zero sign meets both weak inequalities; the row with fewer turning points
/// wins and the tie is recorded.
inline TwoChangeVerdict classify_two_changes(const RatioProfile& profile, const EndpointSignature& sig,
                                             const std::function<HScan()>& hscan) {
  if (profile.change_count != 2) throw parameter_error("two-change rule needs a profile with n = 2");
  const bool mirrored = profile.first_direction() == Direction::decreasing;
  const int s1 = to_int(mirrored ? negate(sig.h_at_end.sign) : sig.h_at_end.sign);
  const int s2 = to_int(mirrored ? negate(sig.h_deriv_at_end.sign) : sig.h_deriv_at_end.sign);

  TwoChangeVerdict v;
  std::optional<double> witness;
  if (s1 >= 0 && s2 > 0) {
    v.scan = hscan();
    witness = mirrored ? v.scan->first_positive : v.scan->first_negative;
  }
  std::vector<int> rows;
  if (s1 >= 0 && s2 <= 0) rows.push_back(1);
  if (s1 > 0 && s2 > 0 && !witness) rows.push_back(2);
  if (s1 < 0 && s2 <= 0) rows.push_back(3);
  if (s1 <= 0 && s2 > 0) rows.push_back(4);
  if (s1 >= 0 && s2 > 0 && witness) rows.push_back(5);
  if (rows.empty()) {
    throw ambiguous_classification("endpoint signs (" + std::to_string(s1) + ", " + std::to_string(s2) +
                                   ") match no row of the two-change table");
  }
  static constexpr Shape shapes[] = {Shape::inc, Shape::inc, Shape::inc_dec, Shape::inc_dec,
                                     Shape::inc_dec_inc};
  const int base = *std::min_element(rows.begin(), rows.end(), [](int l, int r) {
    return turning_point_count(shapes[l - 1]) < turning_point_count(shapes[r - 1]);
  });
  const int offset = mirrored ? 5 : 0;
  v.row = base + offset;
  for (int r : rows) v.candidate_rows.push_back(r + offset);
  v.shape = mirrored ? mirror(shapes[base - 1]) : shapes[base - 1];
  v.tie = s1 == 0 || s2 == 0;
  v.grid_certified = base == 2 || base == 5;
  v.witness_x0 = witness;
  return v;
}

enum class LocalBehavior { inc_near_zero, dec_near_zero, undetermined };

constexpr std::string_view to_string(LocalBehavior l) {
  switch (l) {
    case LocalBehavior::inc_near_zero: return "inc-near-zero";
    case LocalBehavior::dec_near_zero: return "dec-near-zero";
    case LocalBehavior::undetermined: return "undetermined";
  }
  return "undetermined";
}

/// Direction of A/B on some (0, x0): that of c_1 - c_0, provided c_0..c_m is
/// strictly monotone.
inline LocalBehavior local_behavior(const PowerSeries& a, const PowerSeries& b, std::size_t m,
                                    double tol = 1e-12) {
  if (m < 1) throw parameter_error("local rule needs m >= 1");
  std::vector<double> c(m + 1);
  for (std::size_t k = 0; k <= m; ++k) c[k] = a.coefficient(k) / b.coefficient(k);
  const double d0 = c[1] - c[0];
  if (std::abs(d0) <= tol) return LocalBehavior::undetermined;
  for (std::size_t k = 1; k < m; ++k) {
    const double d = c[k + 1] - c[k];
    if (std::abs(d) <= tol || (d > 0) != (d0 > 0)) return LocalBehavior::undetermined;
  }
  return d0 > 0 ? LocalBehavior::inc_near_zero : LocalBehavior::dec_near_zero;
}

/// Upper bound on the monotonicity changes of A^(l)/B^(l): the change count
/// of the ratio sequence with the slots removed by l derivatives dropped.
inline std::size_t max_changes_bound(const RatioProfile& profile, int l) {
  if (l < 0) throw parameter_error("derivative order must be >= 0");
  const std::size_t s = derivative_slot_shift(profile.parity, l);
  return std::min(profile.change_count, shifted(profile, s).change_count);
}

namespace detail {

inline void add_condition(ClassificationReport& rep, std::string name, const SignValue& v) {
  rep.conditions.push_back({std::move(name), v.magnitude, v.sign});
}

}  // namespace detail

/// Full classification of A/B on (0, r): profile, rule dispatch on the change
/// count, endpoint signature and turning-point brackets.
inline ClassificationReport classify(const RatioProblem& p, const ClassifierConfig& cfg = {}) {
  const double radius = std::min(p.a.radius(), p.b.radius());
  if (!(p.r > 0.0) || p.r > radius) {
    throw domain_error("domain (0, " + std::to_string(p.r) + ") exceeds the convergence radius " +
                       std::to_string(radius));
  }
  ClassificationReport rep;
  rep.profile = build_profile(p.a, p.b, cfg.tol_const, p.tail_direction);
  const std::size_t n = rep.profile.change_count;

  if (n == 1 || n == 2) {
    rep.signature = endpoint_signature(p.a, p.b, p.kernel, p.r, cfg.tol_sign);
  } else {
    try {
      rep.signature = endpoint_signature(p.a, p.b, p.kernel, p.r, cfg.tol_sign);
    } catch (const undetermined_limit&) {
      // the endpoint signs are informational for these rules
    }
  }
  if (rep.signature) {
    detail::add_condition(rep, "H_zero", rep.signature->h_at_zero);
    detail::add_condition(rep, "H_end", rep.signature->h_at_end);
    detail::add_condition(rep, "H_deriv_end", rep.signature->h_deriv_at_end);
  }
  rep.x_max = sampling_extent(p, rep.signature);

  const HFunction h(p.a, p.b);
  auto h_sample = [&](double x) { return h.sample(x); };

  if (n == 0) {
    rep.rule = Rule::zero_change;
    const Direction d = rep.profile.first_direction();
    rep.pattern.shape = d == Direction::increasing   ? Shape::inc
                        : d == Direction::decreasing ? Shape::dec
                                                     : Shape::constant;
  } else if (n == 1) {
    rep.rule = Rule::one_change;
    const Sign s = rep.signature->h_at_end.sign;
    if (rep.profile.first_direction() == Direction::increasing) {
      rep.pattern.shape = s == Sign::negative ? Shape::inc_dec : Shape::inc;
    } else {
      rep.pattern.shape = s == Sign::positive ? Shape::dec_inc : Shape::dec;
    }
    rep.tie = s == Sign::zero;
  } else if (n == 2) {
    rep.rule = Rule::two_change;
    const TwoChangeVerdict v = classify_two_changes(rep.profile, *rep.signature, [&] {
      return scan_h_sign(h_sample, rep.x_max, cfg.grid, cfg.tol_sign);
    });
    rep.pattern.shape = v.shape;
    rep.row = v.row;
    rep.candidate_rows = v.candidate_rows;
    rep.tie = v.tie;
    rep.grid_certified = v.grid_certified;
    rep.witness_x0 = v.witness_x0;
    rep.scan = v.scan;
    if (v.scan) {
      rep.conditions.push_back({"H_grid_min", v.scan->min_value,
                                make_sign(v.scan->min_value, 0.0).sign});
      rep.conditions.push_back({"H_grid_max", v.scan->max_value,
                                make_sign(v.scan->max_value, 0.0).sign});
    }
    if (rep.grid_certified) {
      rep.note = v.witness_x0 ? "witness x0 found on a " + std::to_string(v.scan->points) + "-point grid"
                              : "sign of H certified on a " + std::to_string(v.scan->points) +
                                    "-point grid only";
    }
  } else {
    rep.rule = Rule::count_bound;
    rep.pattern.shape = Shape::bound_only;
    rep.pattern.change_bound = n;
  }

  const std::size_t tp = turning_point_count(rep.pattern.shape);
  if (tp > 0) {
    const double scale = std::isfinite(p.r) ? p.r : rep.x_max;
    rep.pattern.turning_points =
        locate_turning_points(h_sample, tp, rep.x_max, cfg.tol_bisect * scale, cfg.grid, cfg.tol_sign);
  }
  return rep;
}

}  // namespace psmono
