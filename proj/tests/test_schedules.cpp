#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "saddle/errors.hpp"
#include "saddle/schedules.hpp"

using namespace saddle;

TEST(Schedules, ValueExamples) {
  EXPECT_DOUBLE_EQ(StepSchedule::power(1.0, 1.0, 2).value(0), 0.5);
  EXPECT_DOUBLE_EQ(StepSchedule::constant(0.1).value(999), 0.1);
  EXPECT_DOUBLE_EQ(StepSchedule::power(1.0, 0.5, 1).value(3), 0.5);
  EXPECT_DOUBLE_EQ(StepSchedule::power(2.0, 4.0, 1).value(1), 2.0 / 16.0);
  EXPECT_DOUBLE_EQ(StepSchedule::geometric(0.1, 0.5).value(3), 0.0125);
}

TEST(Schedules, DefaultOffsetIsTwo) {
  EXPECT_DOUBLE_EQ(StepSchedule::power(1.0, 1.0).value(0), 0.5);
}

TEST(Schedules, ClassifySum) {
  EXPECT_EQ(classify_sum(StepSchedule::power(1.0, 1.0, 1)), SumClass::divergent_sum);
  EXPECT_EQ(classify_sum(StepSchedule::power(1.0, 0.5, 1)), SumClass::divergent_sum);
  EXPECT_EQ(classify_sum(StepSchedule::power(1.0, 4.0, 1)), SumClass::convergent_sum);
  EXPECT_EQ(classify_sum(StepSchedule::constant(0.3)), SumClass::divergent_sum);
  EXPECT_EQ(classify_sum(StepSchedule::geometric(1.0, 0.5)), SumClass::convergent_sum);
  EXPECT_EQ(classify_sum(StepSchedule::table({0.9, 0.8}, StepSchedule::power(1.0, 2.0, 1))),
            SumClass::convergent_sum);
  EXPECT_EQ(classify_sum(StepSchedule::table({0.9, 0.8}, StepSchedule::power(1.0, 1.0, 2))),
            SumClass::divergent_sum);
}

TEST(Schedules, PartialSumExamples) {
  EXPECT_NEAR(partial_sum(StepSchedule::power(1.0, 1.0, 2), 2), 0.5 + 1.0 / 3.0 + 0.25, 1e-15);
  EXPECT_NEAR(partial_sum(StepSchedule::constant(0.1), 9), 1.0, 1e-15);
  // H_100 from 40-digit arithmetic.
  EXPECT_NEAR(partial_sum(StepSchedule::power(1.0, 1.0, 1), 99), 5.18737751763962026, 1e-13);
}

TEST(Schedules, PositiveAndNonincreasingEverywhere) {
  std::vector<StepSchedule> all;
  for (const auto& name : builtin_schedule_names()) all.push_back(builtin_schedule(name));
  all.push_back(StepSchedule::geometric(0.5, 0.5));
  all.push_back(StepSchedule::table({0.9, 0.5, 0.5}, StepSchedule::power(1.0, 1.0, 2)));
  for (const auto& s : all) {
    double prev = s.value(0);
    ASSERT_GT(prev, 0.0) << s.id();
    for (std::int64_t k = 1; k <= 1'000'000; ++k) {
      const double v = s.value(k);
      ASSERT_GT(v, 0.0) << s.id() << " k=" << k;
      ASSERT_LE(v, prev) << s.id() << " k=" << k;
      prev = v;
    }
  }
}

TEST(Schedules, GeometricFloorKeepsValuesPositive) {
  const auto s = StepSchedule::geometric(1.0, 0.5);
  EXPECT_EQ(s.value(5000), std::numeric_limits<double>::denorm_min());
}

TEST(Schedules, PartialSumIncreasing) {
  for (const auto& name : builtin_schedule_names()) {
    const auto s = builtin_schedule(name);
    double prev = partial_sum(s, 0);
    for (std::int64_t k = 1; k <= 2000; ++k) {
      const double cur = partial_sum(s, k);
      ASSERT_GE(cur, prev) << name;
      if (s.value(k) > 1e-15 * prev) ASSERT_GT(cur, prev) << name << " k=" << k;
      prev = cur;
    }
  }
}

TEST(Schedules, HarmonicPartialSumExceedsTen) {
  const auto s = StepSchedule::power(1.0, 1.0, 1);
  double sum = 0.0;
  std::int64_t k = 0;
  for (; k <= 1'000'000 && sum <= 10.0; ++k) sum += s.value(k);
  EXPECT_GT(sum, 10.0);
  EXPECT_LE(k, 1'000'000);
}

TEST(Schedules, SummableSchedulesStayBelowTailBound) {
  for (const auto& s : {StepSchedule::power(1.0, 4.0, 1), StepSchedule::power(0.5, 1.5, 2),
                        StepSchedule::geometric(0.1, 0.9)}) {
    for (std::int64_t k0 : {0, 5, 100}) {
      EXPECT_LE(partial_sum(s, 1'000'000), partial_sum(s, k0) + tail_bound(s, k0) + 1e-12) << s.id();
    }
  }
  EXPECT_TRUE(std::isinf(tail_bound(StepSchedule::power(1.0, 1.0, 2), 10)));
}

TEST(Schedules, TableUsesAbsoluteIndexForTail) {
  const auto s = StepSchedule::table({0.9, 0.6}, StepSchedule::power(1.0, 1.0, 2));
  EXPECT_DOUBLE_EQ(s.value(0), 0.9);
  EXPECT_DOUBLE_EQ(s.value(1), 0.6);
  EXPECT_DOUBLE_EQ(s.value(2), 0.25);
}

TEST(Schedules, RejectsInvalidParameters) {
  EXPECT_THROW((void)StepSchedule::power(0.0, 1.0, 2), InvalidArgument);
  EXPECT_THROW((void)StepSchedule::power(1.0, 0.0, 2), InvalidArgument);
  EXPECT_THROW((void)StepSchedule::power(1.0, 1.0, 0), InvalidArgument);
  EXPECT_THROW((void)StepSchedule::constant(-1.0), InvalidArgument);
  EXPECT_THROW((void)StepSchedule::geometric(0.1, 1.0), InvalidArgument);
  EXPECT_THROW((void)StepSchedule::geometric(0.1, 0.0), InvalidArgument);
  EXPECT_THROW((void)StepSchedule::table({0.1, 0.2}, StepSchedule::constant(0.05)), InvalidArgument);
  EXPECT_THROW((void)StepSchedule::table({0.1, 0.01}, StepSchedule::constant(0.05)), InvalidArgument);
  EXPECT_THROW((void)StepSchedule::constant(0.1).value(-1), InvalidArgument);
  EXPECT_THROW((void)builtin_schedule("nope"), InvalidArgument);
}

TEST(Schedules, Ids) {
  EXPECT_EQ(StepSchedule::power(1.0, 1.0, 2).id(), "power(c=1,p=1,offset=2)");
  EXPECT_EQ(StepSchedule::constant(0.1).id(), "constant(c=0.1)");
}
