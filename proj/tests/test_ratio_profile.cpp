#include <gtest/gtest.h>

#include "psmono/kernels.hpp"
#include "psmono/ratio_profile.hpp"
#include "psmono/verifier.hpp"

using namespace psmono;

namespace {

// c_k against the geometric kernel (b_k = 1), so a_k = c_k.
PowerSeries geometric_numerator(std::vector<double> c, double limit, double delta) {
  return PowerSeries(std::move(c), KernelTail{geometric_kernel(), 0, limit, 0.0, delta, 0.5}, 1.0);
}

std::vector<Direction> directions(const RatioProfile& p) {
  std::vector<Direction> d;
  for (const auto& s : p.segments) d.push_back(s.direction);
  return d;
}

const Direction inc = Direction::increasing;
const Direction dec = Direction::decreasing;

}  // namespace

TEST(ValidateDenominator, KernelIsPositive) {
  EXPECT_NO_THROW(validate_denominator(make_kernel(exp_kernel(), 64)));
}

TEST(ValidateDenominator, ZeroCoefficientNamesIndex) {
  try {
    validate_denominator(PowerSeries({1, 0, 1}));
    FAIL() << "accepted b_1 = 0";
  } catch (const hypothesis_violation& e) {
    EXPECT_EQ(e.index(), 1u);
    EXPECT_NE(std::string(e.what()).find("b_k > 0 fails at k = 1"), std::string::npos);
  }
}

TEST(ValidateDenominator, NegativeCoefficient) {
  EXPECT_THROW(validate_denominator(PowerSeries({1, -0.5})), hypothesis_violation);
}

TEST(ValidateDenominator, TailThatTurnsNegative) {
  // b_k / beta_k = 0.1 - 0.5 q^(k-N) is negative right after the prefix
  const PowerSeries b({1.0, 1.0}, KernelTail{exp_kernel(), 0, 0.1, 0.0, -0.5, 0.5});
  EXPECT_THROW(validate_denominator(b), hypothesis_violation);
}

TEST(BuildProfile, TwoChanges) {
  // 0, 1, 2, 1.5, 1.0, 0.5, then increasing towards 0.9
  const auto a = geometric_numerator({0, 1, 2, 1.5, 1.0, 0.5}, 0.9, -0.4);
  const RatioProfile p = build_profile(a, make_kernel(geometric_kernel(), 64));
  EXPECT_EQ(p.change_count, 2u);
  EXPECT_EQ(*p.m1(), 2u);
  EXPECT_EQ(*p.m2(), 5u);
  EXPECT_EQ(directions(p), (std::vector<Direction>{inc, dec, inc}));
  EXPECT_EQ(p.strict_at_zero, Sign::positive);
}

TEST(BuildProfile, ConstantSequence) {
  const auto a = geometric_numerator({5, 5, 5}, 5.0, 0.0);
  const RatioProfile p = build_profile(a, make_kernel(geometric_kernel(), 64));
  EXPECT_EQ(p.change_count, 0u);
  EXPECT_EQ(p.first_direction(), Direction::constant);
  EXPECT_EQ(p.strict_at_zero, Sign::zero);
}

TEST(BuildProfile, ConstantTailIsAbsorbed) {
  // c = [1, 2, 0, 0, ...]: up, down, then flat; the flat stretch does not count
  const RatioProfile p = build_profile(PowerSeries({1, 2}), make_kernel(geometric_kernel(), 64));
  EXPECT_EQ(p.change_count, 1u);
  EXPECT_EQ(directions(p), (std::vector<Direction>{inc, dec}));
  EXPECT_FALSE(p.constant_runs.empty());
}

TEST(BuildProfile, InteriorConstantRunLowersCount) {
  // increasing, flat, increasing: one monotone run
  const RatioProfile p = profile_from_ratios({0, 1, 1, 1, 2, 3}, std::nullopt, std::nullopt);
  EXPECT_EQ(p.change_count, 0u);
  EXPECT_EQ(p.first_direction(), inc);
}

TEST(BuildProfile, SegmentsTileTheSequence) {
  const RatioProfile p = profile_from_ratios({0, 1, 2, 1.5, 1.0, 0.5, 0.7, 0.8}, std::nullopt, inc);
  ASSERT_FALSE(p.segments.empty());
  EXPECT_EQ(p.segments.front().start, 0u);
  for (std::size_t i = 1; i < p.segments.size(); ++i) {
    EXPECT_EQ(p.segments[i].start, p.segments[i - 1].end);
    EXPECT_NE(p.segments[i].direction, p.segments[i - 1].direction);
  }
  EXPECT_TRUE(p.segments.back().unbounded);
}

TEST(BuildProfile, UndeclaredTailIsInsufficient) {
  // geometric-bound numerator over a kernel: nothing fixes the tail direction
  const PowerSeries a({0.0, 1.0, 0.5}, GeometricTail{0.5});
  EXPECT_THROW(build_profile(a, make_kernel(exp_kernel(), 64)), insufficient_data);
  EXPECT_NO_THROW(build_profile(a, make_kernel(exp_kernel(), 64), 1e-12, dec));
}

TEST(BuildProfile, DeclaredDirectionMustMatchTail) {
  const auto a = geometric_numerator({0, 1, 2}, 3.0, -0.5);
  EXPECT_THROW(build_profile(a, make_kernel(geometric_kernel(), 64), 1e-12, dec), hypothesis_violation);
}

TEST(BuildProfile, ParityMismatch) {
  EXPECT_THROW(build_profile(PowerSeries({1, 2}), make_kernel(sinh_kernel(1.0), 64)), hypothesis_violation);
}

TEST(BuildProfile, ToleranceZeroGivesSameCountOnExactData) {
  const auto a = geometric_numerator({0, 1, 2, 1.5, 1.0, 0.5}, 0.9, -0.4);
  const auto b = make_kernel(geometric_kernel(), 64);
  EXPECT_EQ(build_profile(a, b, 0.0).change_count, build_profile(a, b).change_count);
}

TEST(BuildProfile, CommonPositiveScalingLeavesProfile) {
  std::vector<double> b{1.0, 0.5, 2.0, 0.25, 3.0}, a{0.0, 0.5, 4.0, 0.25, 0.0};
  const RatioProfile p0 = build_profile(PowerSeries(a), PowerSeries(b));
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] *= (k + 1.5);
    b[k] *= (k + 1.5);
  }
  const RatioProfile p1 = build_profile(PowerSeries(a), PowerSeries(b));
  EXPECT_EQ(p0.change_count, p1.change_count);
  EXPECT_EQ(p0.change_indices, p1.change_indices);
}

TEST(ShiftProfile, DropsFirstIndex) {
  const auto a = geometric_numerator({0, 1, 2, 1.5, 1.0, 0.5}, 0.9, -0.4);
  const RatioProfile s = shift_profile(a, make_kernel(geometric_kernel(), 64));
  EXPECT_EQ(s.change_count, 2u);
  EXPECT_EQ(*s.m1(), 1u);
  EXPECT_EQ(*s.m2(), 4u);
}

TEST(ShiftProfile, ConstantStaysConstant) {
  const auto a = geometric_numerator({5, 5, 5}, 5.0, 0.0);
  EXPECT_EQ(shift_profile(a, make_kernel(geometric_kernel(), 64)).first_direction(), Direction::constant);
}

TEST(ShiftProfile, DecreasingAfterFirstTerm) {
  // 0, 1, 0.5, 0.25, ... halving towards 0
  const auto a = geometric_numerator({0, 1, 0.5}, 0.0, 0.5);
  const auto b = make_kernel(geometric_kernel(), 64);
  EXPECT_EQ(build_profile(a, b).change_count, 1u);
  const RatioProfile s = shift_profile(a, b);
  EXPECT_EQ(s.change_count, 0u);
  EXPECT_EQ(s.first_direction(), dec);
}

TEST(ShiftProfile, AgreesWithDerivativePair) {
  // the derivative pair's ratios are c_{k+s}, s the number of slots the
  // derivative drops: (k+1) factors cancel
  for (const auto& inst : fuzz_instances({2, std::nullopt}, 30, 3)) {
    const auto& a = inst.problem.a;
    const auto& b = inst.problem.b;
    const std::size_t drop = derivative_slot_shift(b.parity(), 1);
    const RatioProfile s = drop == 1 ? shift_profile(a, b) : build_profile(a, b);
    const RatioProfile d = build_profile(derivative(a), derivative(b));
    EXPECT_EQ(s.change_count, d.change_count) << inst.index;
    const std::size_t n = std::min(s.ratios.size(), d.ratios.size());
    for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(s.ratios[k], d.ratios[k], 1e-10 * (1 + std::abs(s.ratios[k])));
  }
}
