#include <gtest/gtest.h>

#include <cmath>

#include "medsim/policy.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace medsim;
using namespace medsim::testing;

namespace {

Scenario at_points(std::vector<Point> pts, Point base = {0, 0}) {
  Scenario s;
  s.base_position = base;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Patient p;
    p.id = static_cast<PatientId>(i);
    p.position = pts[i];
    p.severity = 0.5;
    p.time_to_criticality = 130.0;
    p.accessibility = 0.6;
    s.patients.push_back(p);
  }
  s.condition.patient_load = pts.size();
  return s;
}

}  // namespace

TEST(OrderTeleop, SinglePatient) {
  Rng rng(1);
  EXPECT_EQ(order_teleop(at_points({{5, 5}}), rng, 0.15).order, std::vector<PatientId>{0});
}

TEST(OrderTeleop, NoErrorsFollowsDistance) {
  Rng rng(1);
  const auto s = at_points({{3, 0}, {1, 0}, {2, 0}});
  EXPECT_EQ(order_teleop(s, rng, 0.0).order, (std::vector<PatientId>{1, 2, 0}));
}

TEST(OrderTeleop, AlwaysAPermutation) {
  Gen g(17);
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_scenario(g, g.size(1, 12), g.coin());
    Rng rng(g.u64());
    ASSERT_TRUE(is_permutation_of(order_teleop(s, rng, g.real(0.0, 1.0)), s));
  }
}

TEST(OrderTeleop, CertainErrorsAreStillPermutations) {
  Rng rng(2);
  const auto s = at_points({{3, 0}, {1, 0}, {2, 0}, {9, 9}});
  EXPECT_TRUE(is_permutation_of(order_teleop(s, rng, 1.0), s));
}

TEST(OrderHeuristic, SinglePatient) {
  EXPECT_EQ(order_heuristic(at_points({{5, 5}})).order, std::vector<PatientId>{0});
}

TEST(OrderHeuristic, EquidistantGoesToLowerId) {
  EXPECT_EQ(order_heuristic(at_points({{0, 2}, {2, 0}})).order, (std::vector<PatientId>{0, 1}));
  EXPECT_EQ(order_heuristic(at_points({{2, 0}, {0, 2}})).order, (std::vector<PatientId>{0, 1}));
}

TEST(OrderHeuristic, FivePatientsMatchOracle) {
  const auto s = at_points({{8, 1}, {2, 2}, {5, 5}, {1, 9}, {3, 3}}, {0, 0});
  const auto oracle = nearest_neighbour_oracle(s);
  EXPECT_EQ(oracle, (std::vector<PatientId>{1, 4, 2, 0, 3}));
  EXPECT_EQ(order_heuristic(s).order, oracle);
}

TEST(TriageScore, WeightIsolation) {
  Patient p;
  p.severity = 0.37;
  p.time_to_criticality = 20.0;
  p.accessibility = 0.9;
  EXPECT_EQ(triage_score(p, {1.0, 0.0, 0.0, 60.0}), 0.37);
}

TEST(TriageScore, HandEvaluation) {
  Patient p;
  p.severity = 0.5;
  p.time_to_criticality = 60.0;
  p.accessibility = 0.5;
  const double v = triage_score(p, {1.0, 1.0, 1.0, 60.0});
  EXPECT_NEAR(v, 0.5 + std::exp(-1.0) + 0.5, 1e-15);
  EXPECT_NEAR(v, 1.3679, 5e-5);
}

TEST(TriageScore, SoonerCriticalScoresHigher) {
  Patient a, b;
  a.time_to_criticality = 30.0;
  b.time_to_criticality = 90.0;
  EXPECT_GT(triage_score(a, {}), triage_score(b, {}));
}

TEST(OrderTriage, IdenticalPatientsKeepIdOrder) {
  const auto s = at_points({{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  EXPECT_EQ(order_triage(s, {}).order, (std::vector<PatientId>{0, 1, 2, 3}));
}

TEST(OrderTriage, SixPatientsMatchSortOracle) {
  Gen g(6);
  const auto s = random_scenario(g, 6);
  const TriageWeights w;
  EXPECT_EQ(order_triage(s, w).order, triage_oracle(s, w));
}

TEST(OrderTriage, ScalingWeightsKeepsOrder) {
  Gen g(10);
  const auto s = random_scenario(g, 8);
  const TriageWeights w{1.0, 1.0, 0.5, 60.0};
  const TriageWeights w10{10.0, 10.0, 5.0, 60.0};
  EXPECT_EQ(order_triage(s, w).order, order_triage(s, w10).order);
}

TEST(TriageWeights, Validation) {
  EXPECT_NO_THROW(validate(TriageWeights{}));
  EXPECT_THROW(validate(TriageWeights{-1.0, 1.0, 1.0, 60.0}), std::invalid_argument);
  EXPECT_THROW(validate(TriageWeights{0.0, 0.0, 0.0, 60.0}), std::invalid_argument);
  EXPECT_THROW(validate(TriageWeights{1.0, 1.0, 1.0, 0.0}), std::invalid_argument);
}

TEST(PolicyNames, RoundTrip) {
  for (PolicyId p : kAllPolicies) EXPECT_EQ(parse_policy(to_string(p)), p);
  EXPECT_FALSE(parse_policy("pi4").has_value());
}
