#include <cmath>

#include <gtest/gtest.h>

#include "psmono/h_engine.hpp"
#include "psmono/kernels.hpp"
#include "psmono/turning_points.hpp"

using namespace psmono;

namespace {

Sample quad(double x) { return {1 - 4 * x, 1.0}; }
Sample cubic_h(double x) { return {6 * x * x - 5 * x + 1, 1.0}; }

}  // namespace

TEST(Locate, NothingExpected) {
  EXPECT_TRUE(locate_turning_points(quad, 0, 1.0, 1e-9).empty());
}

TEST(Locate, QuarterRoot) {
  const auto b = locate_turning_points(quad, 1, 1.0, 1e-9);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_TRUE(b[0].contains(0.25));
  EXPECT_LE(b[0].width(), 1e-9);
  EXPECT_EQ(b[0].sign_left, Sign::positive);
  EXPECT_EQ(b[0].sign_right, Sign::negative);
}

TEST(Locate, QuadraticRoots) {
  const auto b = locate_turning_points(cubic_h, 2, 1.0, 1e-9);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_TRUE(b[0].contains(1.0 / 3));
  EXPECT_TRUE(b[1].contains(0.5));
  EXPECT_LT(b[0].hi, b[1].lo);
  for (const auto& br : b) {
    EXPECT_LE(br.width(), 1e-9);
    EXPECT_NE(cubic_h(br.lo).value > 0, cubic_h(br.hi).value > 0);
  }
}

TEST(Locate, FromSeries) {
  const PowerSeries a({0.5, 1.5, -1, 1}, KernelTail{geometric_kernel(), 0, 1.0, 0.0, 0.0, 0.5}, 1.0);
  const HFunction h(a, make_kernel(geometric_kernel(), 64));
  const auto b = locate_turning_points([&](double x) { return h.sample(x); }, 2, 1.0 - 1e-6, 1e-9);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_TRUE(b[0].contains(1.0 / 3));
  EXPECT_TRUE(b[1].contains(0.5));
}

TEST(Locate, WrongCountIsLocalizationFailure) {
  try {
    locate_turning_points(quad, 2, 1.0, 1e-9, 64);
    FAIL();
  } catch (const localization_failure& e) {
    // the trace lists every refinement round
    EXPECT_NE(std::string(e.what()).find("grid 4096"), std::string::npos);
  }
}

TEST(Locate, TangentialZeroIsLocalizationFailure) {
  EXPECT_THROW(locate_turning_points([](double x) { return Sample{(x - 0.3) * (x - 0.3), 1.0}; }, 1, 1.0, 1e-9),
               localization_failure);
}

TEST(Locate, CloseRootsNeedRefinement) {
  // roots 0.5 +- 1e-4 are merged on a 64-point grid but separate after refinement
  auto h = [](double x) { return Sample{(x - 0.4999) * (x - 0.5001), 1.0}; };
  const auto b = locate_turning_points(h, 2, 1.0, 1e-12, 64, 0.0);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_TRUE(b[0].contains(0.4999));
  EXPECT_TRUE(b[1].contains(0.5001));
}

TEST(Property, HalvingToleranceKeepsRoot) {
  const auto coarse = locate_turning_points(cubic_h, 2, 1.0, 1e-6);
  const auto fine = locate_turning_points(cubic_h, 2, 1.0, 5e-7);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_GE(fine[i].lo, coarse[i].lo);
    EXPECT_LE(fine[i].hi, coarse[i].hi);
  }
}
