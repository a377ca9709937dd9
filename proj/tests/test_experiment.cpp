#include <gtest/gtest.h>

#include "medsim/experiment.hpp"

using namespace medsim;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.degradation_levels = {0.0, 1.0};
  cfg.patient_loads = {3, 8};
  cfg.trials_per_condition = 6;
  return cfg;
}

}  // namespace

TEST(SweepConfig, DefaultsDescribeFifteenThousandMissions) {
  const SweepConfig cfg;
  EXPECT_EQ(cfg.condition_count(), 20u);
  EXPECT_EQ(cfg.policies.size(), 3u);
  EXPECT_EQ(cfg.trials_per_condition, 250u);
  EXPECT_EQ(cfg.total_missions(), 15000u);
}

TEST(SweepConfig, ConditionsEnumerateDegradationOutermost) {
  const SweepConfig cfg;
  EXPECT_EQ(cfg.condition(0), (Condition{0, 0.0, 5}));
  EXPECT_EQ(cfg.condition(3), (Condition{3, 0.0, 40}));
  EXPECT_EQ(cfg.condition(4), (Condition{4, 0.25, 5}));
  EXPECT_EQ(cfg.condition(19), (Condition{19, 1.0, 40}));
}

TEST(RunSweep, RecordCountAndOrder) {
  const auto cfg = small_config();
  const auto r = run_sweep(cfg);
  ASSERT_EQ(r.trials.size(), cfg.total_missions());
  std::size_t k = 0;
  for (std::size_t c = 0; c < cfg.condition_count(); ++c)
    for (PolicyId p : cfg.policies)
      for (std::size_t t = 0; t < cfg.trials_per_condition; ++t, ++k) {
        EXPECT_EQ(r.trials[k].condition_index, c);
        EXPECT_EQ(r.trials[k].policy, p);
        EXPECT_EQ(r.trials[k].trial, t);
      }
  EXPECT_EQ(r.summaries.size(), cfg.condition_count() * cfg.policies.size());
  EXPECT_EQ(r.rollup.size(), 3u);
}

TEST(RunSweep, SingleTrialSummaryEqualsRecord) {
  SweepConfig cfg;
  cfg.degradation_levels = {0.5};
  cfg.patient_loads = {10};
  cfg.policies = {PolicyId::pi2_auto};
  cfg.trials_per_condition = 1;
  const auto r = run_sweep(cfg);
  ASSERT_EQ(r.trials.size(), 1u);
  ASSERT_EQ(r.summaries.size(), 1u);
  const auto& m = r.trials[0].metrics;
  const auto& s = r.summaries[0];
  EXPECT_EQ(s.vector.rho, m.rho);
  EXPECT_EQ(s.vector.W_mean, m.workload);
  EXPECT_EQ(s.vector.R_fail, m.aborted ? 1.0 : 0.0);
  EXPECT_EQ(s.duration.mean, m.duration);
  double sum = 0.0;
  for (const auto& d : m.high_severity_delays) sum += d.delay;
  if (!m.high_severity_delays.empty()) {
    EXPECT_DOUBLE_EQ(s.vector.T_int_mean, sum / static_cast<double>(m.high_severity_delays.size()));
  }
}

TEST(RunSweep, WorkerCountDoesNotChangeResults) {
  const auto cfg = small_config();
  const auto one = run_sweep(cfg, 1);
  for (std::size_t w : {2u, 3u, 8u}) EXPECT_EQ(run_sweep(cfg, w).trials, one.trials);
}

TEST(RunSweep, PoliciesShareScenarioAndOutages) {
  // Common random numbers: with the same trial index every policy sees the same patients.
  const auto cfg = small_config();
  const auto a = run_trial(cfg, 1, PolicyId::pi1_teleop, 4);
  const auto b = run_trial(cfg, 1, PolicyId::pi3_geodt, 4);
  EXPECT_EQ(a.metrics.total_patients, b.metrics.total_patients);
  ASSERT_EQ(a.metrics.high_severity_delays.size(), b.metrics.high_severity_delays.size());
  for (std::size_t i = 0; i < a.metrics.high_severity_delays.size(); ++i)
    EXPECT_EQ(a.metrics.high_severity_delays[i].patient, b.metrics.high_severity_delays[i].patient);
}

TEST(Validate, RejectsOutOfRangeConfigs) {
  auto expect_key = [](SweepConfig cfg, const std::string& key) {
    try {
      validate(cfg);
      ADD_FAILURE() << "expected rejection of " << key;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.key(), key);
    }
  };
  SweepConfig c;
  c.degradation_levels = {0.0, 1.5};
  expect_key(c, "degradation_levels");
  c = {};
  c.trials_per_condition = 0;
  expect_key(c, "trials_per_condition");
  c = {};
  c.policies.clear();
  expect_key(c, "policies");
  c = {};
  c.patient_loads = {0};
  expect_key(c, "patient_loads");
  c = {};
  c.metrics.tau_c = 0.0;
  expect_key(c, "metrics.tau_c");
  c = {};
  c.mission.operators.q_dt = 2.0;
  expect_key(c, "operators.q_dt");
  c = {};
  c.mission.localization.auto_sigma = 1.0;
  expect_key(c, "localization.auto_sigma");
  EXPECT_NO_THROW(validate(SweepConfig{}));
}

TEST(Analyze, ParetoScopesCoverEveryCell) {
  const auto cfg = small_config();
  const auto r = run_sweep(cfg);
  std::size_t pooled = 0, scoped = 0, pooled_front = 0;
  for (const auto& e : r.pareto) {
    if (e.scope_condition) {
      ++scoped;
    } else {
      ++pooled;
      pooled_front += e.on_front ? 1 : 0;
    }
  }
  EXPECT_EQ(pooled, r.summaries.size());
  EXPECT_EQ(scoped, r.summaries.size());
  EXPECT_GE(pooled_front, 1u);
}

TEST(Analyze, EffectiveSuccessIsServiceTimesReliability) {
  MetricVector v{10.0, 0.4, 0.25, 0.1, 3};
  EXPECT_DOUBLE_EQ(effective_success(v), 0.3);
}
