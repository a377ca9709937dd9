#include <gtest/gtest.h>

#include <cmath>

#include "medsim/metrics.hpp"
#include "support/hand_traces.hpp"

using namespace medsim;
using namespace medsim::testing;

class HandTrace : public ::testing::TestWithParam<HandCase> {};

TEST_P(HandTrace, MatchesHandComputation) {
  const std::string err = GetParam().run();
  EXPECT_TRUE(err.empty()) << GetParam().name << ": " << err;
}

INSTANTIATE_TEST_SUITE_P(Metrics, HandTrace, ::testing::ValuesIn(hand_cases()),
                         [](const ::testing::TestParamInfo<HandCase>& info) {
                           return "case" + std::to_string(info.index);
                         });

TEST(HandTraceSuite, HasAtLeastTwentyCases) { EXPECT_GE(hand_cases().size(), 20u); }

TEST(FailureRate, EmptyIsAnError) {
  const std::vector<bool> none;
  EXPECT_THROW(failure_rate(none), std::invalid_argument);
}

TEST(Workload, NegativeWeightsRejected) {
  EXPECT_THROW(workload(0.1, 0.1, -1.0, 1.0), std::invalid_argument);
}

TEST(AggregateWorkload, PermutationInvariant) {
  const std::vector<double> a{0.01, 0.07, 0.03, 0.11};
  const std::vector<double> b{0.11, 0.03, 0.01, 0.07};
  EXPECT_DOUBLE_EQ(aggregate_workload(a), aggregate_workload(b));
  EXPECT_THROW(aggregate_workload(std::vector<double>{}), std::invalid_argument);
}

TEST(ServedWithinWindow, RejectsNonPositiveWindow) {
  EXPECT_THROW(served_within_window({}, {}, 0.0), std::invalid_argument);
}

TEST(Dominates, ReferenceVectors) {
  const MetricVector p1{182.584, 0.0247, 0.1810, 0.0381, 0};
  const MetricVector p2{50.947, 0.2209, 0.1224, 0.0440, 0};
  const MetricVector p3{29.546, 0.1295, 0.0664, 0.0200, 0};
  EXPECT_TRUE(dominates(p3, p1));
  EXPECT_FALSE(dominates(p1, p3));
  EXPECT_FALSE(dominates(p3, p2));
  EXPECT_FALSE(dominates(p2, p3));
  // pi2 beats pi1 on delay, service and failures but carries the higher workload.
  EXPECT_LT(p2.T_int_mean, p1.T_int_mean);
  EXPECT_GT(p2.rho, p1.rho);
  EXPECT_LT(p2.R_fail, p1.R_fail);
  EXPECT_GT(p2.W_mean, p1.W_mean);
  EXPECT_FALSE(dominates(p2, p1));
  EXPECT_FALSE(dominates(p1, p2));
}

TEST(Dominates, EqualVectorsDoNotDominate) {
  const MetricVector a{10.0, 0.5, 0.1, 0.02, 0};
  EXPECT_FALSE(dominates(a, a));
}

TEST(Dominates, HigherServiceIsBetter) {
  const MetricVector a{10.0, 0.6, 0.1, 0.02, 0};
  const MetricVector b{10.0, 0.5, 0.1, 0.02, 0};
  EXPECT_TRUE(dominates(a, b));
  EXPECT_FALSE(dominates(b, a));
}

TEST(MetricVector, EmptyCellIsAnError) {
  EXPECT_THROW(metric_vector(std::span<const TrialMetrics>{}), std::invalid_argument);
}
