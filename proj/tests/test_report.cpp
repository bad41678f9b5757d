#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "psmono/report.hpp"

using namespace psmono;

#ifndef PSMONO_DATA_DIR
#define PSMONO_DATA_DIR "data/instances"
#endif

namespace {

json load(const std::string& name) {
  std::ifstream in(std::string(PSMONO_DATA_DIR) + "/" + name);
  if (!in) throw std::runtime_error("cannot open fixture " + name);
  return json::parse(in);
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::vector<int> sign_blocks(const std::vector<std::vector<double>>& rows) {
  std::vector<int> blocks;
  for (const auto& r : rows) {
    const int s = r[4] > 0 ? 1 : (r[4] < 0 ? -1 : 0);
    if (s != 0 && (blocks.empty() || blocks.back() != s)) blocks.push_back(s);
  }
  return blocks;
}

json strip_time(json j) {
  j.erase("generated_at");
  return j;
}

}  // namespace

TEST(Parse, GeometricFixture) {
  const InstanceSpec s = parse_instance(load("geometric_one_change.json"));
  EXPECT_EQ(s.problem.r, 1.0);
  ASSERT_TRUE(s.problem.kernel);
  EXPECT_EQ(s.problem.kernel->kind, KernelKind::geometric);
  EXPECT_EQ(s.problem.a.coefficient(1), 2.0);
  EXPECT_EQ(s.problem.a.coefficient(2), 0.0);
}

TEST(Parse, DomainDefaultsToRadius) {
  const InstanceSpec s = parse_instance(json::parse(R"({"numerator": {"coefficients": [1, 2]},
                                                         "denominator": {"kernel": "recip_pow", "d": 2}})"));
  EXPECT_EQ(s.problem.r, 1.0);
}

TEST(Parse, RatiosAreScaledByKernel) {
  const InstanceSpec s = parse_instance(load("exp_two_change.json"));
  EXPECT_TRUE(std::isinf(s.problem.r));
  EXPECT_DOUBLE_EQ(s.problem.a.coefficient(2), 1.0);
  EXPECT_DOUBLE_EQ(s.problem.a.coefficient(3), 0.25);
}

TEST(Parse, DerivativesForm) {
  const InstanceSpec s = parse_instance(json::parse(R"({"numerator": {"derivatives": [1, 2, 6]},
                                                         "denominator": {"kernel": "exp"}})"));
  EXPECT_DOUBLE_EQ(s.problem.a.coefficient(2), 3.0);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_instance(json::parse(R"({"numerator": {"coefficients": [1]}})")), parameter_error);
  EXPECT_THROW(parse_instance(json::parse(R"({"numerator": {"coefficients": [1], "ratios": [1]},
                                              "denominator": {"kernel": "exp"}})")),
               parameter_error);
  EXPECT_THROW(parse_instance(json::parse(R"({"numerator": {"coefficients": [1, 2]},
                                              "denominator": {"kernel": "recip_pow"}})")),
               parameter_error);
  EXPECT_THROW(parse_instance(json::parse(R"({"numerator": {"coefficients": [1, 2]},
                                              "denominator": {"kernel": "geometric"}, "domain": 2})")),
               parameter_error);
  EXPECT_THROW(parse_instance(json::parse(R"({"numerator": {"coefficients": [1, 2]},
                                              "denominator": {"kernel": "bessel"}})")),
               parameter_error);
  EXPECT_THROW(parse_instance(json::parse("[1, 2]")), parameter_error);
}

TEST(Parse, TruncationOverride) {
  const InstanceSpec s = parse_instance(load("exp_two_change.json"), 32);
  EXPECT_EQ(s.truncation, 32u);
  EXPECT_EQ(s.problem.b.size(), 32u);
}

TEST(Parse, NeglogDropsConstantTerm) {
  const InstanceSpec s = parse_instance(json::parse(R"({"numerator": {"coefficients": [5, 1, 0.5]},
                                                         "denominator": {"kernel": "neglog", "d": 1}})"));
  EXPECT_EQ(s.problem.a.coefficient(0), 1.0);
  EXPECT_NE(s.normalization.find("dropped"), std::string::npos);
  const json j = cmd_classify(s).report;
  EXPECT_TRUE(j.contains("normalization"));
}

TEST(Parse, SinhOffParityCoefficientIsRejected) {
  EXPECT_THROW(parse_instance(json::parse(R"({"numerator": {"coefficients": [0, 1, 1]},
                                              "denominator": {"kernel": "sinh", "d": 1}})")),
               hypothesis_violation);
  const InstanceSpec s = parse_instance(json::parse(R"({"numerator": {"coefficients": [0, 1, 0, 2]},
                                                         "denominator": {"kernel": "sinh", "d": 1}})"));
  EXPECT_EQ(s.problem.a.coefficient(1), 2.0);
}

TEST(Classify, ReportFields) {
  const CommandResult c = cmd_classify(parse_instance(load("geometric_one_change.json")));
  EXPECT_EQ(c.exit_code, exit_ok);
  EXPECT_EQ(c.report.at("rule"), "MR5");
  EXPECT_EQ(c.report.at("shape"), "inc-dec");
  const auto& tp = c.report.at("turning_points");
  ASSERT_EQ(tp.size(), 1u);
  EXPECT_LE(tp[0].at("lo").get<double>(), 0.25);
  EXPECT_GE(tp[0].at("hi").get<double>(), 0.25);
  EXPECT_EQ(c.report.at("local_behavior"), "inc-near-zero");
}

TEST(Classify, RoundTripThroughEmbeddedInstance) {
  for (const char* name : {"geometric_one_change.json", "geometric_two_change.json", "exp_two_change.json"}) {
    const json first = cmd_classify(parse_instance(load(name))).report;
    const json again = cmd_classify(parse_instance(first.at("instance"))).report;
    EXPECT_EQ(strip_time(first), strip_time(again)) << name;
  }
}

TEST(Classify, DeterministicApartFromTimestamp) {
  const InstanceSpec s = parse_instance(load("exp_two_change.json"));
  EXPECT_EQ(strip_time(cmd_classify(s).report), strip_time(cmd_classify(s).report));
  EXPECT_EQ(cmd_classify(s).report.at("row"), 5);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(hypothesis_violation("x", 1)), exit_hypothesis);
  EXPECT_EQ(exit_code_for(insufficient_data("x")), exit_hypothesis);
  EXPECT_EQ(exit_code_for(undetermined_limit("x")), exit_undetermined);
  EXPECT_EQ(exit_code_for(localization_failure("x")), exit_undetermined);
  EXPECT_EQ(exit_code_for(parameter_error("x")), exit_usage);
}

TEST(ExitCodes, ZeroDenominatorCoefficient) {
  try {
    cmd_classify(parse_instance(load("zero_denominator_coefficient.json")));
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_EQ(exit_code_for(e), exit_hypothesis);
    EXPECT_NE(std::string(e.what()).find("b_k > 0 fails at k = 1"), std::string::npos);
  }
}

TEST(Verify, ForcedMismatchExitsFour) {
  const CommandResult v = cmd_verify(parse_instance(load("forced_mismatch.json")));
  EXPECT_EQ(v.exit_code, exit_disagreement);
  EXPECT_FALSE(v.report.at("verification").at("agreement").get<bool>());
}

TEST(Verify, EqualPairIsConstant) {
  const CommandResult v = cmd_verify(parse_instance(load("equal_pair.json")));
  EXPECT_EQ(v.exit_code, exit_ok);
  EXPECT_EQ(v.report.at("shape"), "constant");
}

TEST(Samples, RowCountAndHeader) {
  const std::string csv = cmd_samples(parse_instance(load("geometric_one_change.json")), 256);
  EXPECT_EQ(csv.rfind("x,A,B,A/B,H\n", 0), 0u);
  EXPECT_EQ(csv_rows(csv).size(), 256u);
}

TEST(Samples, GeometricSignChangeNearQuarter) {
  const auto rows = csv_rows(cmd_samples(parse_instance(load("geometric_one_change.json")), 256));
  EXPECT_EQ(sign_blocks(rows), (std::vector<int>{1, -1}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i - 1][4] > 0 && rows[i][4] < 0) {
      EXPECT_LE(rows[i - 1][0], 0.25);
      EXPECT_GE(rows[i][0], 0.25);
    }
  }
}

TEST(Samples, ExpRowFiveSignBlocks) {
  const auto rows = csv_rows(cmd_samples(parse_instance(load("exp_two_change.json")), 256));
  EXPECT_EQ(sign_blocks(rows), (std::vector<int>{1, -1, 1}));
}

TEST(Fuzz, EmptyRun) {
  FuzzOptions o;
  o.count = 0;
  const CommandResult f = cmd_fuzz(o);
  EXPECT_EQ(f.exit_code, exit_ok);
  EXPECT_TRUE(f.report.at("records").empty());
}

TEST(Fuzz, SummaryCountsMatchRecords) {
  FuzzOptions o;
  o.count = 30;
  o.seed = 5;
  const CommandResult f = cmd_fuzz(o);
  EXPECT_EQ(f.exit_code, exit_ok);
  int total = 0;
  for (const auto& [k, v] : f.report.at("rules").items()) total += v.at("pass").get<int>() + v.at("fail").get<int>();
  EXPECT_EQ(total + f.report.at("undetermined").get<int>(), 30);
}

TEST(Kernels, TableListsFamilies) {
  const std::string t = cmd_kernels();
  for (const char* k : {"exp", "geometric", "recip_pow", "neglog", "sinh", "cosh"}) {
    EXPECT_NE(t.find(k), std::string::npos) << k;
  }
}
