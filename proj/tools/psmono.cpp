// psmono: classify the monotonicity of A(x)/B(x) from a JSON instance.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "psmono/psmono.hpp"

namespace {

psmono::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw psmono::parameter_error("cannot open " + path);
  try {
    return psmono::json::parse(in);
  } catch (const psmono::json::parse_error& e) {
    throw psmono::parameter_error(path + ": " + e.what());
  }
}

void write_out(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw psmono::parameter_error("cannot write " + out);
  f << text;
}

struct Options {
  std::string input;
  std::string out;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> truncation;
  std::optional<double> tol_sign;
  std::optional<double> tol_bisect;
  std::size_t points = 256;
  std::size_t changes = 2;
  std::size_t count = 100;
  std::uint64_t seed = 1;
};

psmono::InstanceSpec load(const Options& o) {
  psmono::InstanceSpec spec = psmono::parse_instance(read_json(o.input), o.truncation);
  if (o.grid) spec.config.grid = *o.grid;
  if (o.tol_sign) spec.config.tol_sign = *o.tol_sign;
  if (o.tol_bisect) spec.config.tol_bisect = *o.tol_bisect;
  return spec;
}

void add_instance_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("input", o.input, "instance JSON")->required();
  cmd->add_option("--truncation", o.truncation, "stored terms for kernel series");
  cmd->add_option("--tol-sign", o.tol_sign, "zero band for endpoint signs");
  cmd->add_option("--tol-bisect", o.tol_bisect, "bracket width, relative to r");
  cmd->add_option("--grid", o.grid, "scan and verification grid size");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotonicity of ratios of power series"};
  app.require_subcommand(1);
  Options o;

  auto* classify = app.add_subcommand("classify", "classify A/B and write a JSON report");
  auto* verify = app.add_subcommand("verify", "classify, then check the verdict on a dense grid");
  auto* fuzz = app.add_subcommand("fuzz", "classify and verify seeded random instances");
  auto* samples = app.add_subcommand("samples", "CSV of x, A, B, A/B, H");
  auto* kernels = app.add_subcommand("kernels", "list the built-in denominator kernels");

  for (auto* c : {classify, verify, samples}) add_instance_flags(c, o);
  samples->add_option("--points", o.points, "number of rows")->check(CLI::PositiveNumber);
  fuzz->add_option("--changes", o.changes, "monotonicity changes of the ratio sequence");
  fuzz->add_option("--count", o.count, "number of instances");
  fuzz->add_option("--seed", o.seed, "generator seed");
  fuzz->add_option("--grid", o.grid, "verification grid size");
  for (auto* c : {classify, verify, fuzz, samples, kernels}) c->add_option("--out", o.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : psmono::exit_usage;
  }

  try {
    if (*kernels) {
      write_out(o.out, psmono::cmd_kernels());
      return psmono::exit_ok;
    }
    if (*fuzz) {
      psmono::FuzzOptions f;
      f.changes = o.changes;
      f.count = o.count;
      f.seed = o.seed;
      if (o.grid) f.grid = *o.grid;
      const auto res = psmono::cmd_fuzz(f);
      write_out(o.out, res.report.dump(2) + "\n");
      return res.exit_code;
    }
    const psmono::InstanceSpec spec = load(o);
    if (*samples) {
      write_out(o.out, psmono::cmd_samples(spec, o.points));
      return psmono::exit_ok;
    }
    const auto res = *verify ? psmono::cmd_verify(spec, o.grid) : psmono::cmd_classify(spec);
    write_out(o.out, res.report.dump(2) + "\n");
    if (res.exit_code == psmono::exit_disagreement) std::cerr << "psmono: verification disagrees with the verdict\n";
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "psmono: " << e.what() << "\n";
    return psmono::exit_code_for(e);
  }
}
