#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "psmono/classifier.hpp"
#include "psmono/errors.hpp"
#include "psmono/grid.hpp"
#include "psmono/h_engine.hpp"
#include "psmono/kernels.hpp"
#include "psmono/ratio_profile.hpp"
#include "psmono/series_core.hpp"

namespace psmono {

/// Monotone run of sampled values between grid indices [first, last].
struct EmpiricalSegment {
  std::size_t first = 0;
  std::size_t last = 0;
  Direction direction = Direction::constant;
  double x_lo = 0.0;
  double x_hi = 0.0;
};

struct VerificationReport {
  std::size_t grid = 0;
  std::vector<EmpiricalSegment> segments;
  std::size_t tau = 0;  // empirical change count
  bool agreement = false;
  double max_identity_deviation = 0.0;
  std::vector<bool> containment;  // one flag per predicted bracket
  std::vector<double> extrema;    // empirical turning points
  std::string detail;
};

/// Counts alternations in the sign of successive differences, skipping
/// differences with |d| <= tol.
inline std::size_t count_sign_changes(std::span<const double> values, double tol = 0.0) {
  std::size_t changes = 0;
  int prev = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    if (std::abs(d) <= tol) continue;
    const int s = d > 0 ? 1 : -1;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

/// Monotone runs of `values`; differences within a few ulps of the values are
/// ignored and runs of fewer than `window` steps are merged into their
/// neighbours.
inline std::vector<EmpiricalSegment> empirical_segments(std::span<const double> xs,
                                                        std::span<const double> values,
                                                        std::size_t window = 3) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  struct Run {
    int dir;
    std::size_t steps;
    std::size_t first;
    std::size_t last;
  };
  std::vector<Run> runs;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    const double tol = 64.0 * eps * std::max(std::abs(values[i]), std::abs(values[i - 1]));
    if (!(std::abs(d) > tol)) continue;
    const int s = d > 0 ? 1 : -1;
    if (!runs.empty() && runs.back().dir == s) {
      runs.back().steps += 1;
      runs.back().last = i;
    } else {
      runs.push_back({s, 1, i - 1, i});
    }
  }

  auto coalesce = [&] {
    std::vector<Run> out;
    for (const Run& r : runs) {
      if (!out.empty() && out.back().dir == r.dir) {
        out.back().steps += r.steps;
        out.back().last = r.last;
      } else {
        out.push_back(r);
      }
    }
    runs = std::move(out);
  };
  while (runs.size() > 1) {
    std::size_t shortest = runs.size();
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].steps < window && (shortest == runs.size() || runs[i].steps < runs[shortest].steps)) {
        shortest = i;
      }
    }
    if (shortest == runs.size()) break;
    // hand the noisy run's span to a neighbour
    if (shortest > 0) {
      runs[shortest - 1].last = runs[shortest].last;
    } else {
      runs[1].first = runs[0].first;
    }
    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(shortest));
    coalesce();
  }

  std::vector<EmpiricalSegment> segs;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    const std::size_t first = i == 0 ? 0 : segs.back().last;
    segs.push_back({first, r.last, r.dir > 0 ? Direction::increasing : Direction::decreasing, xs[first],
                    xs[r.last]});
  }
  if (!segs.empty()) segs.back().last = values.size() - 1, segs.back().x_hi = xs.back();
  return segs;
}

namespace detail {

inline std::vector<Direction> shape_directions(Shape s) {
  using D = Direction;
  switch (s) {
    case Shape::constant: return {};
    case Shape::inc: return {D::increasing};
    case Shape::dec: return {D::decreasing};
    case Shape::inc_dec: return {D::increasing, D::decreasing};
    case Shape::dec_inc: return {D::decreasing, D::increasing};
    case Shape::inc_dec_inc: return {D::increasing, D::decreasing, D::increasing};
    case Shape::dec_inc_dec: return {D::decreasing, D::increasing, D::decreasing};
    case Shape::bound_only: return {};
  }
  return {};
}

}  // namespace detail

/// Samples F/G on the composite grid over (0, end] and compares the empirical
/// monotone runs and extrema with the predicted pattern.
inline VerificationReport verify_pattern(const PowerSeries& f, const PowerSeries& g,
                                         const MonotonicityPattern& pattern, double end,
                                         std::size_t grid = 4096) {
  if (grid < 16) throw parameter_error("verification grid needs at least 16 points");
  VerificationReport rep;
  const auto xs = composite_grid(end, grid);
  rep.grid = xs.size();
  std::vector<double> q(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) q[i] = evaluate(f, xs[i]).value / evaluate(g, xs[i]).value;
  rep.segments = empirical_segments(xs, q);
  rep.tau = rep.segments.empty() ? 0 : rep.segments.size() - 1;

  for (std::size_t i = 0; i + 1 < rep.segments.size(); ++i) {
    // extreme sample over the two runs meeting at this change
    const auto& s0 = rep.segments[i];
    const auto& s1 = rep.segments[i + 1];
    std::size_t best = s0.first;
    for (std::size_t j = s0.first; j <= s1.last; ++j) {
      const bool better = s0.direction == Direction::increasing ? q[j] > q[best] : q[j] < q[best];
      if (better) best = j;
    }
    rep.extrema.push_back(xs[best]);
  }

  std::vector<double> ix;
  for (std::size_t i = 1; i <= 64; ++i) ix.push_back(end * static_cast<double>(i) / 65.0);
  try {
    const IdentityReport id = check_identities(f, g, ix);
    rep.max_identity_deviation = std::max(id.quotient_deviation, id.h_deviation);
  } catch (const error&) {
    rep.max_identity_deviation = std::numeric_limits<double>::quiet_NaN();
  }

  if (pattern.shape == Shape::bound_only) {
    rep.agreement = rep.tau <= pattern.change_bound.value_or(0);
    rep.detail = "empirical changes " + std::to_string(rep.tau) + " vs bound " +
                 std::to_string(pattern.change_bound.value_or(0));
    return rep;
  }
  const auto want = detail::shape_directions(pattern.shape);
  bool shape_ok = want.size() == rep.segments.size();
  for (std::size_t i = 0; shape_ok && i < want.size(); ++i) shape_ok = want[i] == rep.segments[i].direction;

  bool brackets_ok = pattern.turning_points.size() == rep.extrema.size() || !shape_ok;
  if (shape_ok) {
    for (std::size_t i = 0; i < pattern.turning_points.size(); ++i) {
      const auto& br = pattern.turning_points[i];
      const double x = rep.extrema[i];
      const auto it = std::lower_bound(xs.begin(), xs.end(), x);
      const std::size_t k = static_cast<std::size_t>(it - xs.begin());
      const double left = k > 0 ? xs[k] - xs[k - 1] : xs[k];
      const double right = k + 1 < xs.size() ? xs[k + 1] - xs[k] : left;
      const double step = std::max(left, right);
      const bool inside = x >= br.lo - step && x <= br.hi + step;
      rep.containment.push_back(inside);
      brackets_ok = brackets_ok && inside;
    }
  }
  rep.agreement = shape_ok && brackets_ok;
  rep.detail = "empirical shape";
  for (const auto& s : rep.segments) rep.detail += std::string(" ") + std::string(to_string(s.direction));
  if (rep.segments.empty()) rep.detail += " constant";
  return rep;
}

inline VerificationReport verify(const RatioProblem& p, const ClassificationReport& c, std::size_t grid = 4096) {
  return verify_pattern(p.a, p.b, c.pattern, c.x_max, grid);
}

// ---------------------------------------------------------------------------
// Seeded instance generation

/// splitmix64 finalizer; seeds one mt19937_64 per (seed, index).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr const char* kFuzzAlgorithm = "splitmix64(seed, index) -> mt19937_64, 53-bit uniforms";

class FuzzRng {
 public:
  FuzzRng(std::uint64_t seed, std::uint64_t index) : eng_(splitmix64(splitmix64(seed) ^ index)) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::size_t integer(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(uniform(0.0, 1.0) * static_cast<double>(hi - lo + 1));
  }

 private:
  std::mt19937_64 eng_;
};

struct FuzzRequest {
  std::size_t changes = 0;
  std::optional<Direction> first_direction;  // random when absent
};

struct FuzzInstance {
  std::size_t index = 0;
  RatioProblem problem;
  std::vector<double> ratios;  // generated c_k over the stored prefix
  std::string denominator;     // kernel label or "polynomial"
};

namespace detail {

inline FuzzInstance draw_instance(FuzzRng& rng, const FuzzRequest& req, std::size_t index) {
  const Direction first = req.first_direction
                              ? *req.first_direction
                              : (rng.uniform(0, 1) < 0.5 ? Direction::increasing : Direction::decreasing);
  std::vector<double> c{rng.uniform(-1.0, 1.0)};
  Direction dir = first;
  for (std::size_t seg = 0; seg <= req.changes; ++seg) {
    const std::size_t len = rng.integer(2, 6);
    for (std::size_t i = 0; i < len; ++i) {
      const double step = rng.uniform(0.1, 1.0);
      c.push_back(c.back() + (dir == Direction::increasing ? step : -step));
    }
    dir = opposite(dir);
  }
  const Direction last_dir = opposite(dir);
  const double sgn = last_dir == Direction::increasing ? 1.0 : -1.0;
  const double gap = rng.uniform(0.1, 1.0);

  const std::size_t family = rng.integer(0, 6);
  if (family == 6) {
    // random positive polynomial denominator; the ratio sequence ends with the prefix
    std::vector<double> b(c.size()), a(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      b[k] = rng.uniform(0.2, 2.0) / std::tgamma(static_cast<double>(k) + 1.0);
      a[k] = c[k] * b[k];
    }
    const double r = rng.uniform(0.5, 4.0);
    return {index, RatioProblem{PowerSeries(a), PowerSeries(b), std::nullopt, r, std::nullopt}, c,
            "polynomial"};
  }
  KernelSpec spec;
  switch (family) {
    case 0: spec = exp_kernel(); break;
    case 1: spec = recip_pow_kernel(rng.uniform(0.5, 2.5)); break;
    case 2: spec = geometric_kernel(); break;
    case 3: spec = neglog_kernel(rng.uniform(0.5, 2.0)); break;
    case 4: spec = sinh_kernel(rng.uniform(0.5, 2.0)); break;
    default: spec = cosh_kernel(rng.uniform(0.5, 2.0)); break;
  }
  const PowerSeries b = make_kernel(spec, c.size());
  std::vector<double> a(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) a[k] = c[k] * b.coeffs()[k];
  const KernelTail tail{spec, 0, c.back() + sgn * gap, 0.0, -sgn * gap, 0.5};
  const PowerSeries num(a, tail, kernel_radius(spec), kernel_parity(spec));

  double r = kernel_radius(spec);
  if (std::isinf(r)) {
    r = rng.uniform(0, 1) < 0.5 ? kInf : rng.uniform(0.5, 8.0);
  } else if (rng.uniform(0, 1) < 0.25) {
    r *= rng.uniform(0.3, 0.9);
  }
  return {index, RatioProblem{num, make_kernel(spec), spec, r, std::nullopt}, c, kernel_label(spec)};
}

}  // namespace detail

/// Deterministic instances whose ratio sequence has exactly `req.changes`
/// monotonicity changes. Instance i depends only on (seed, i).
inline std::vector<FuzzInstance> fuzz_instances(const FuzzRequest& req, std::size_t count, std::uint64_t seed) {
  std::vector<FuzzInstance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    FuzzRng rng(seed, i);
    for (int attempt = 0;; ++attempt) {
      FuzzInstance inst = detail::draw_instance(rng, req, i);
      const RatioProfile prof = build_profile(inst.problem.a, inst.problem.b);
      if (prof.change_count == req.changes) {
        out.push_back(std::move(inst));
        break;
      }
      if (attempt > 1000) throw error("fuzz generator could not hit the requested change count");
    }
  }
  return out;
}

}  // namespace psmono
