#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "medsim/experiment.hpp"
#include "medsim/stats.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace medsim;
using namespace medsim::testing;

TEST(ConfidenceInterval, ConstantSampleCollapses) {
  const std::vector<double> xs(6, 4.25);
  const auto ci = confidence_interval(xs);
  EXPECT_EQ(ci.lo, 4.25);
  EXPECT_EQ(ci.hi, 4.25);
}

TEST(ConfidenceInterval, OneToFive) {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const auto ci = confidence_interval(xs);
  // mean 3, s = sqrt(2.5), t(4, 0.975) = 2.776 from the t table.
  const double half = 2.776 * std::sqrt(2.5) / std::sqrt(5.0);
  EXPECT_NEAR(ci.lo, 3.0 - half, 1e-3);
  EXPECT_NEAR(ci.hi, 3.0 + half, 1e-3);
  EXPECT_NEAR(ci.lo, 1.037, 1e-3);
  EXPECT_NEAR(ci.hi, 4.963, 1e-3);
}

TEST(ConfidenceInterval, OutlierWidens) {
  std::vector<double> xs{1, 2, 3, 4, 5};
  const auto a = confidence_interval(xs);
  xs[4] = 50.0;
  const auto b = confidence_interval(xs);
  EXPECT_GT(b.hi - b.lo, a.hi - a.lo);
}

TEST(ConfidenceInterval, NeedsTwoSamples) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(confidence_interval(one), std::invalid_argument);
  const std::vector<double> two{1.0, 2.0};
  EXPECT_THROW(confidence_interval(two, 1.0), std::invalid_argument);
}

TEST(Quantiles, NinetiethOfOneToHundred) {
  std::vector<double> xs(100);
  std::iota(xs.begin(), xs.end(), 1.0);
  const double q[] = {0.9};
  EXPECT_NEAR(quantiles(xs, q)[0], 90.1, 1e-12);
  EXPECT_NEAR(quantile_oracle(xs, 0.9), 90.1, 1e-12);
}

TEST(Quantiles, MedianOfThree) {
  const std::vector<double> xs{3, 1, 2};
  const double q[] = {0.5};
  EXPECT_EQ(quantiles(xs, q)[0], 2.0);
}

TEST(Quantiles, EndpointsAreExtremes) {
  const std::vector<double> xs{4, -2, 9, 0.5};
  const double q[] = {0.0, 1.0};
  const auto v = quantiles(xs, q);
  EXPECT_EQ(v[0], -2.0);
  EXPECT_EQ(v[1], 9.0);
}

TEST(Quantiles, RejectsBadInput) {
  const std::vector<double> xs{1.0};
  const double bad[] = {1.5};
  EXPECT_THROW(quantiles(xs, bad), std::invalid_argument);
  const double ok[] = {0.5};
  EXPECT_THROW(quantiles(std::vector<double>{}, ok), std::invalid_argument);
}

TEST(Boxplot, SingleSample) {
  const std::vector<double> xs{7.0};
  const auto b = boxplot_stats(xs);
  EXPECT_EQ(b.min, 7.0);
  EXPECT_EQ(b.q1, 7.0);
  EXPECT_EQ(b.median, 7.0);
  EXPECT_EQ(b.q3, 7.0);
  EXPECT_EQ(b.max, 7.0);
}

TEST(Boxplot, OneToFive) {
  const std::vector<double> xs{5, 3, 1, 4, 2};
  const auto b = boxplot_stats(xs);
  EXPECT_EQ(b.min, 1.0);
  EXPECT_EQ(b.q1, 2.0);
  EXPECT_EQ(b.median, 3.0);
  EXPECT_EQ(b.q3, 4.0);
  EXPECT_EQ(b.max, 5.0);
}

namespace {

std::vector<ParetoPoint> pts(std::initializer_list<std::pair<double, double>> xy) {
  std::vector<ParetoPoint> out;
  for (auto [x, y] : xy) out.push_back({PolicyId::pi1_teleop, 0, 0.0, 0, x, y, 0.0});
  return out;
}

std::vector<std::pair<double, double>> coords(const std::vector<ParetoPoint>& ps) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : ps) out.emplace_back(p.x, p.y);
  return out;
}

}  // namespace

TEST(ParetoFront, ThreePointExample) {
  const auto in = pts({{1, 1}, {2, 2}, {0.5, 3}});
  EXPECT_EQ(coords(pareto_front(in)), (std::vector<std::pair<double, double>>{{1, 1}, {0.5, 3}}));
}

TEST(ParetoFront, SinglePoint) {
  const auto in = pts({{4, 2}});
  EXPECT_EQ(pareto_front(in).size(), 1u);
}

TEST(ParetoFront, DuplicatesBothSurvive) {
  const auto in = pts({{1, 1}, {1, 1}, {2, 0.5}, {3, 3}});
  EXPECT_EQ(coords(pareto_front(in)), (std::vector<std::pair<double, double>>{{1, 1}, {1, 1}, {2, 0.5}}));
}

TEST(ParetoFront, EqualXKeepsOnlyLowestY) {
  const auto in = pts({{1, 2}, {1, 1}, {0.5, 5}});
  EXPECT_EQ(coords(pareto_front(in)), (std::vector<std::pair<double, double>>{{1, 1}, {0.5, 5}}));
}

TEST(Summarize, SingleSampleHasDegenerateInterval) {
  const std::vector<double> xs{2.5};
  const auto s = summarize(xs);
  EXPECT_EQ(s.n, 1u);
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_EQ(s.ci_lo, 2.5);
  EXPECT_EQ(s.ci_hi, 2.5);
}
