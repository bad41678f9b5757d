#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "psmono/classifier.hpp"
#include "psmono/errors.hpp"
#include "psmono/kernels.hpp"
#include "psmono/ratio_profile.hpp"
#include "psmono/series_core.hpp"
#include "psmono/verifier.hpp"

namespace psmono {

using json = nlohmann::json;

/// Parsed instance: the problem to classify plus run settings.
struct InstanceSpec {
  json source;  // the input document, embedded verbatim in reports
  RatioProblem problem;
  ClassifierConfig config;
  std::size_t truncation = kDefaultTruncation;
  std::optional<Shape> pattern_override;
  std::string normalization;
};

namespace detail {

inline double number_or_inf(const json& v, const char* what) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
    throw parameter_error(std::string(what) + " must be a number or \"inf\"");
  }
  if (!v.is_number()) throw parameter_error(std::string(what) + " must be a number or \"inf\"");
  return v.get<double>();
}

inline std::vector<double> number_list(const json& v, const char* what) {
  if (!v.is_array() || v.empty()) throw parameter_error(std::string(what) + " must be a non-empty list");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw parameter_error(std::string(what) + " must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

inline KernelSpec parse_kernel(const json& den) {
  KernelSpec k;
  k.kind = parse_kernel_kind(den.at("kernel").get<std::string>());
  if (kernel_has_parameter(k.kind)) {
    if (!den.contains("d")) throw parameter_error(std::string(to_string(k.kind)) + " kernel needs d");
    k.d = den.at("d").get<double>();
  }
  if (k.kind == KernelKind::polynomial) k.degree = den.at("degree").get<int>();
  validate_kernel(k);
  return k;
}

// Coefficients in the general layout x^k mapped onto the kernel's slots.
inline std::vector<double> to_slots(const std::vector<double>& c, Parity p, std::string& note) {
  switch (p) {
    case Parity::general: return c;
    case Parity::shifted: {
      if (c.size() < 2) throw insufficient_data("numerator needs a_1 for the -ln(1-dx) kernel");
      note = "a_0 = " + std::to_string(c[0]) + " dropped: the ratio is taken as (A - a_0)/B";
      return {c.begin() + 1, c.end()};
    }
    case Parity::odd:
    case Parity::even: {
      const std::size_t off = p == Parity::odd ? 1 : 0;
      std::vector<double> out;
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (k % 2 == off) {
          out.push_back(c[k]);
        } else if (c[k] != 0.0) {
          throw hypothesis_violation("coefficient of x^" + std::to_string(k) + " is nonzero but the " +
                                         std::string(to_string(p)) + " layout has no such slot",
                                     k);
        }
      }
      if (out.empty()) throw insufficient_data("no coefficient falls on a kernel slot");
      return out;
    }
  }
  return c;
}

inline Tail parse_tail(const json& t, const std::optional<KernelSpec>& kernel) {
  const auto kind = t.value("kind", std::string("finite"));
  if (kind == "finite") return FiniteTail{};
  if (kind == "geometric") {
    const double rho = t.at("rho").get<double>();
    if (!(rho >= 0.0)) throw parameter_error("geometric tail needs rho >= 0");
    return GeometricTail{rho};
  }
  if (kind == "kernel") {
    if (!kernel) throw parameter_error("a kernel tail needs a kernel denominator");
    return KernelTail{*kernel, 0, t.value("limit", 0.0), t.value("slope", 0.0), t.value("delta", 0.0),
                      t.value("q", 0.5)};
  }
  throw parameter_error("unknown tail kind '" + kind + "'");
}

}  // namespace detail

/// Parses an instance document:
///
///   numerator    {coefficients | derivatives | ratios, tail?, layout?}
///   denominator  {kernel, d?, degree?} or {coefficients}
///   domain       r or "inf" (default: the kernel radius, or inf)
///   truncation, grid, tolerances {sign, constancy, bisection},
///   tail_direction, pattern_override
inline InstanceSpec parse_instance(const json& doc, std::optional<std::size_t> truncation_override = {}) {
  ClassifierConfig config;
  std::string normalization;
  std::optional<Shape> pattern_override;
  if (!doc.is_object()) throw parameter_error("instance must be a JSON object");
  if (!doc.contains("numerator") || !doc.contains("denominator")) {
    throw parameter_error("instance needs a numerator and a denominator");
  }
  const std::size_t truncation = truncation_override.value_or(doc.value("truncation", kDefaultTruncation));
  if (truncation < 2) throw parameter_error("truncation must be >= 2");

  const json& den = doc.at("denominator");
  std::optional<KernelSpec> kernel;
  std::optional<PowerSeries> b;
  const bool den_kernel = den.contains("kernel");
  if (den_kernel == den.contains("coefficients")) {
    throw parameter_error("denominator needs exactly one of kernel, coefficients");
  }
  if (den_kernel) {
    kernel = detail::parse_kernel(den);
    b = make_kernel(*kernel, truncation);
  } else {
    b = PowerSeries(detail::number_list(den.at("coefficients"), "denominator coefficients"));
  }
  const Parity parity = b->parity();

  const json& num = doc.at("numerator");
  const int forms = num.contains("coefficients") + num.contains("derivatives") + num.contains("ratios");
  if (forms != 1) throw parameter_error("numerator needs exactly one of coefficients, derivatives, ratios");
  Tail tail = detail::parse_tail(num.value("tail", json::object()), kernel);
  const bool slots = num.value("layout", std::string("general")) == "slots";

  std::vector<double> a;
  if (num.contains("ratios")) {
    const auto c = detail::number_list(num.at("ratios"), "numerator ratios");
    const PowerSeries be = b->size() >= c.size() ? *b : (kernel ? make_kernel(*kernel, c.size()) : *b);
    if (be.size() < c.size()) throw hypothesis_violation("b_k > 0 fails at k = " + std::to_string(be.size()), be.size());
    for (std::size_t k = 0; k < c.size(); ++k) a.push_back(c[k] * be.coeffs()[k]);
  } else {
    std::vector<double> c;
    if (num.contains("coefficients")) {
      c = detail::number_list(num.at("coefficients"), "numerator coefficients");
    } else {
      const auto v = detail::number_list(num.at("derivatives"), "numerator derivatives");
      const PowerSeries s = coeffs_from_derivatives(v);
      c.assign(s.coeffs().begin(), s.coeffs().end());
    }
    a = slots ? c : detail::to_slots(c, parity, normalization);
  }
  const double radius = kernel ? kernel_radius(*kernel) : kInf;
  PowerSeries an(a, tail, radius, parity);

  const double r = doc.contains("domain") ? detail::number_or_inf(doc.at("domain"), "domain") : b->radius();
  if (!(r > 0.0)) throw parameter_error("domain r must be positive");
  if (r > b->radius()) {
    throw parameter_error("domain r = " + std::to_string(r) + " exceeds the kernel radius " +
                          std::to_string(b->radius()));
  }

  std::optional<Direction> dir;
  if (doc.contains("tail_direction")) dir = parse_direction(doc.at("tail_direction").get<std::string>());

  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    config.tol_sign = t.value("sign", config.tol_sign);
    config.tol_const = t.value("constancy", config.tol_const);
    config.tol_bisect = t.value("bisection", config.tol_bisect);
  }
  config.grid = doc.value("grid", config.grid);
  if (doc.contains("pattern_override")) pattern_override = parse_shape(doc.at("pattern_override").get<std::string>());
  return InstanceSpec{doc, RatioProblem{std::move(an), std::move(*b), kernel, r, dir}, config, truncation,
                      pattern_override, normalization};
}

// ---------------------------------------------------------------------------
// Report serialization

inline json to_json(const SignValue& s) {
  json j;
  if (s.infinite()) j["value"] = s.magnitude > 0 ? "+inf" : "-inf";
  else j["value"] = s.magnitude;
  j["sign"] = std::string(to_string(s.sign));
  j["tolerance"] = s.tolerance;
  return j;
}

inline json to_json(const LimitResult& l) {
  json j = to_json(l.value);
  j["method"] = l.method;
  j["slow_convergence"] = l.slow_convergence;
  j["stable_from"] = l.stable_from;
  json tr = json::array();
  for (const auto& p : l.trace) tr.push_back({p.x, std::isfinite(p.value) ? json(p.value) : json(p.value > 0 ? "+inf" : "-inf")});
  j["trace"] = tr;
  return j;
}

inline json to_json(const RatioProfile& p) {
  json j;
  j["n"] = p.change_count;
  if (p.m1() && p.change_count == 2) {
    j["m1"] = *p.m1();
    j["m2"] = *p.m2();
  } else if (p.m1()) {
    j["m1"] = *p.m1();
  }
  j["ratios"] = p.ratios;
  if (p.junction) j["junction"] = *p.junction;
  j["tail_direction"] = p.tail_direction ? json(std::string(to_string(*p.tail_direction))) : json(nullptr);
  json segs = json::array();
  for (const auto& s : p.segments) {
    segs.push_back({{"start", s.start}, {"end", s.unbounded ? json("inf") : json(s.end)},
                    {"direction", std::string(to_string(s.direction))}});
  }
  j["segments"] = segs;
  json runs = json::array();
  for (const auto& s : p.constant_runs) runs.push_back({{"start", s.start}, {"end", s.end}});
  j["absorbed_constant_runs"] = runs;
  j["strict_at_zero"] = std::string(to_string(p.strict_at_zero));
  return j;
}

inline json to_json(const VerificationReport& v) {
  json j;
  j["grid"] = v.grid;
  j["agreement"] = v.agreement;
  j["tau"] = v.tau;
  j["max_identity_deviation"] = std::isfinite(v.max_identity_deviation) ? json(v.max_identity_deviation) : json(nullptr);
  json segs = json::array();
  for (const auto& s : v.segments) {
    segs.push_back({{"x_lo", s.x_lo}, {"x_hi", s.x_hi}, {"direction", std::string(to_string(s.direction))}});
  }
  j["segments"] = segs;
  j["extrema"] = v.extrema;
  j["containment"] = v.containment;
  j["detail"] = v.detail;
  return j;
}

inline json to_json(const ClassificationReport& r) {
  json j;
  j["rule"] = std::string(to_string(r.rule));
  j["shape"] = std::string(to_string(r.pattern.shape));
  if (r.row) {
    j["row"] = *r.row;
    j["branch"] = *r.branch();
  }
  j["profile"] = to_json(r.profile);
  if (r.profile.change_count == 2) {
    j["m1"] = *r.profile.m1();
    j["m2"] = *r.profile.m2();
  } else if (r.profile.change_count == 1) {
    j["m1"] = *r.profile.m1();
  }
  if (r.signature) {
    j["H_zero"] = to_json(r.signature->h_at_zero);
    j["H_end"] = to_json(r.signature->end_detail);
    j["H_deriv_end"] = to_json(r.signature->deriv_detail);
    j["limit_method"] = r.signature->method;
  }
  json tps = json::array();
  for (const auto& b : r.pattern.turning_points) {
    tps.push_back({{"lo", b.lo}, {"hi", b.hi}, {"mid", b.mid()}, {"width", b.width()}});
  }
  j["turning_points"] = tps;
  const auto& tp = r.pattern.turning_points;
  if (tp.size() == 1) j["x1"] = tp[0].mid();
  if (tp.size() == 2) {
    j["x2"] = tp[0].mid();
    j["x3"] = tp[1].mid();
  }
  if (r.pattern.change_bound) j["change_bound"] = *r.pattern.change_bound;
  if (r.witness_x0) j["witness_x0"] = *r.witness_x0;
  j["grid_certified"] = r.grid_certified;
  j["tie"] = r.tie;
  if (!r.candidate_rows.empty()) j["candidate_rows"] = r.candidate_rows;
  json conds = json::array();
  for (const auto& c : r.conditions) {
    conds.push_back({{"name", c.name},
                     {"value", std::isfinite(c.value) ? json(c.value) : json(c.value > 0 ? "+inf" : "-inf")},
                     {"sign", std::string(to_string(c.sign))}});
  }
  j["conditions"] = conds;
  if (!r.note.empty()) j["note"] = r.note;
  j["x_max"] = r.x_max;
  return j;
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Commands

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_hypothesis = 2, exit_undetermined = 3, exit_disagreement = 4 };

struct CommandResult {
  json report;
  int exit_code = exit_ok;
};

/// Exit code for an error raised while classifying.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const hypothesis_violation*>(&e) || dynamic_cast<const insufficient_data*>(&e)) {
    return exit_hypothesis;
  }
  if (dynamic_cast<const undetermined_limit*>(&e) || dynamic_cast<const localization_failure*>(&e) ||
      dynamic_cast<const ambiguous_classification*>(&e)) {
    return exit_undetermined;
  }
  return exit_usage;
}

inline json classification_json(const InstanceSpec& spec, const ClassificationReport& rep) {
  json j = to_json(rep);
  j["local_behavior"] = std::string(to_string(
      rep.profile.ratios.size() >= 2 ? local_behavior(spec.problem.a, spec.problem.b, 1, spec.config.tol_const)
                                     : LocalBehavior::undetermined));
  if (!spec.normalization.empty()) j["normalization"] = spec.normalization;
  if (spec.problem.kernel) j["kernel"] = kernel_label(*spec.problem.kernel);
  j["domain"] = std::isinf(spec.problem.r) ? json("inf") : json(spec.problem.r);
  j["instance"] = spec.source;
  j["generated_at"] = utc_timestamp();
  return j;
}

inline CommandResult cmd_classify(const InstanceSpec& spec) {
  const ClassificationReport rep = classify(spec.problem, spec.config);
  return {classification_json(spec, rep), exit_ok};
}

inline CommandResult cmd_verify(const InstanceSpec& spec, std::optional<std::size_t> grid = {}) {
  ClassificationReport rep = classify(spec.problem, spec.config);
  MonotonicityPattern pattern = rep.pattern;
  if (spec.pattern_override) {
    pattern.shape = *spec.pattern_override;
    if (turning_point_count(pattern.shape) != pattern.turning_points.size()) pattern.turning_points.clear();
  }
  const VerificationReport v =
      verify_pattern(spec.problem.a, spec.problem.b, pattern, rep.x_max, grid.value_or(spec.config.grid));
  json j = classification_json(spec, rep);
  if (spec.pattern_override) j["pattern_override"] = std::string(to_string(*spec.pattern_override));
  j["verification"] = to_json(v);
  return {j, v.agreement ? exit_ok : exit_disagreement};
}

struct FuzzOptions {
  std::size_t changes = 2;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::size_t grid = 4096;
};

inline CommandResult cmd_fuzz(const FuzzOptions& opt) {
  json j;
  j["changes"] = opt.changes;
  j["count"] = opt.count;
  j["seed"] = opt.seed;
  j["algorithm"] = kFuzzAlgorithm;
  j["grid"] = opt.grid;
  json records = json::array(), failures = json::array();
  std::map<std::string, std::pair<int, int>> by_row, by_rule;
  std::size_t undetermined = 0;
  for (const auto& inst : fuzz_instances({opt.changes, std::nullopt}, opt.count, opt.seed)) {
    json rec;
    rec["index"] = inst.index;
    rec["denominator"] = inst.denominator;
    rec["domain"] = std::isinf(inst.problem.r) ? json("inf") : json(inst.problem.r);
    rec["ratios"] = inst.ratios;
    try {
      ClassifierConfig cfg;
      cfg.grid = opt.grid;
      const ClassificationReport rep = classify(inst.problem, cfg);
      const VerificationReport v = verify(inst.problem, rep, opt.grid);
      rec["rule"] = std::string(to_string(rep.rule));
      rec["shape"] = std::string(to_string(rep.pattern.shape));
      if (rep.row) rec["row"] = *rep.row;
      rec["tau"] = v.tau;
      rec["agreement"] = v.agreement;
      const std::string row = rep.row ? std::to_string(*rep.row) : std::string("-");
      auto& rr = by_row[row];
      auto& ru = by_rule[rec["rule"].get<std::string>()];
      (v.agreement ? rr.first : rr.second) += 1;
      (v.agreement ? ru.first : ru.second) += 1;
      if (!v.agreement) {
        json full = to_json(rep);
        full["verification"] = to_json(v);
        full["index"] = inst.index;
        full["denominator"] = inst.denominator;
        full["ratios"] = inst.ratios;
        failures.push_back(full);
      }
    } catch (const undetermined_limit& e) {
      ++undetermined;
      rec["undetermined"] = e.what();
    } catch (const localization_failure& e) {
      rec["agreement"] = false;
      rec["error"] = e.what();
      failures.push_back(rec);
    }
    records.push_back(rec);
  }
  json rows = json::object(), rules = json::object();
  for (const auto& [k, v] : by_row) rows[k] = {{"pass", v.first}, {"fail", v.second}};
  for (const auto& [k, v] : by_rule) rules[k] = {{"pass", v.first}, {"fail", v.second}};
  j["rows"] = rows;
  j["rules"] = rules;
  j["undetermined"] = undetermined;
  j["disagreements"] = failures;
  j["records"] = records;
  j["generated_at"] = utc_timestamp();
  return {j, failures.empty() ? exit_ok : exit_disagreement};
}

/// CSV with columns x, A, B, A/B, H on `points` uniform abscissae of the
/// sampled interval.
inline std::string cmd_samples(const InstanceSpec& spec, std::size_t points) {
  if (points < 1) throw parameter_error("--points must be >= 1");
  std::optional<EndpointSignature> sig;
  if (!std::isfinite(spec.problem.r)) {
    try {
      sig = endpoint_signature(spec.problem.a, spec.problem.b, spec.problem.kernel, spec.problem.r,
                               spec.config.tol_sign);
    } catch (const undetermined_limit&) {
    }
  }
  const double end = sampling_extent(spec.problem, sig);
  const HFunction h(spec.problem.a, spec.problem.b);
  std::ostringstream out;
  out << "x,A,B,A/B,H\n";
  char line[256];
  for (std::size_t i = 1; i <= points; ++i) {
    const double x = end * static_cast<double>(i) / static_cast<double>(points);
    const double av = evaluate(spec.problem.a, x).value;
    const double bv = evaluate(spec.problem.b, x).value;
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", x, av, bv, av / bv, h(x));
    out << line;
  }
  return out.str();
}

inline std::string cmd_kernels() {
  std::ostringstream out;
  out << "kernel      parameter  B(x)            slots        radius\n"
         "exp         -          e^x             x^k          inf\n"
         "recip_pow   d > 0      (1-x)^-d        x^k          1\n"
         "geometric   -          1/(1-x)         x^k          1\n"
         "neglog      d > 0      -ln(1-dx)       x^(k+1)      1/d\n"
         "sinh        d > 0      sinh(dx)        x^(2k+1)     inf\n"
         "cosh        d > 0      cosh(dx)        x^(2k)       inf\n"
         "polynomial  degree     1 + x + ... + x^degree        inf\n";
  return out.str();
}

}  // namespace psmono
