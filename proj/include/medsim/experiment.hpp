#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "medsim/engine.hpp"
#include "medsim/localization.hpp"
#include "medsim/metrics.hpp"
#include "medsim/policy.hpp"
#include "medsim/scenario.hpp"
#include "medsim/stats.hpp"

namespace medsim {

struct SweepConfig {
  std::uint64_t master_seed = 20250601;
  std::vector<double> degradation_levels{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<std::size_t> patient_loads{5, 10, 20, 40};
  std::vector<PolicyId> policies{kAllPolicies.begin(), kAllPolicies.end()};
  std::size_t trials_per_condition = 250;
  MetricParams metrics;
  TriageWeights weights;
  MissionParams mission;
  ScenarioParams scenario;

  std::size_t condition_count() const { return degradation_levels.size() * patient_loads.size(); }
  std::size_t total_missions() const { return condition_count() * policies.size() * trials_per_condition; }

  /// Condition c enumerates degradation levels outermost, then loads.
  Condition condition(std::size_t c) const {
    return {c, degradation_levels.at(c / patient_loads.size()), patient_loads.at(c % patient_loads.size())};
  }

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

/// One mission outcome, keyed by its cell and trial index.
struct TrialRecord {
  PolicyId policy = PolicyId::pi1_teleop;
  std::size_t condition_index = 0;
  double delta = 0.0;
  std::size_t load = 0;
  std::size_t trial = 0;
  AbortCause abort_cause = AbortCause::none;
  TrialMetrics metrics;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct MetricSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;

  friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

struct DelayQuantiles {
  double median = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;

  friend bool operator==(const DelayQuantiles&, const DelayQuantiles&) = default;
};

struct ConditionSummary {
  PolicyId policy = PolicyId::pi1_teleop;
  std::size_t condition_index = 0;
  double delta = 0.0;
  std::size_t load = 0;
  std::size_t trials = 0;
  MetricVector vector;
  std::optional<MetricSummary> t_int;  // over pooled high-severity delays
  MetricSummary rho;
  MetricSummary failure;               // over per-trial abort indicators
  MetricSummary workload;
  MetricSummary duration;
  std::optional<DelayQuantiles> delay_quantiles;
  std::optional<FiveNumber> delay_box;
  FiveNumber workload_box;
};

/// Policy-level aggregate over every cell (the Table-I view).
struct PolicyRollup {
  PolicyId policy = PolicyId::pi1_teleop;
  std::size_t trials = 0;
  MetricVector vector;
  double mission_time = 0.0;
  std::optional<DelayQuantiles> delay_quantiles;
};

struct ParetoPoint {
  PolicyId policy = PolicyId::pi1_teleop;
  std::size_t condition_index = 0;
  double delta = 0.0;
  std::size_t load = 0;
  double x = 0.0;     // T_int_mean, min
  double y = 0.0;     // R_fail
  double size = 0.0;  // effective success rho (1 - R_fail)
};

struct ParetoEntry {
  std::optional<std::size_t> scope_condition;  // nullopt: pooled over all cells
  ParetoPoint point;
  bool on_front = false;
};

struct SweepResult {
  std::vector<TrialRecord> trials;
  std::vector<ConditionSummary> summaries;
  std::vector<PolicyRollup> rollup;
  std::vector<ParetoEntry> pareto;
};

inline double effective_success(const MetricVector& v) { return v.rho * (1.0 - v.R_fail); }

inline std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points) {
  const auto keep = pareto_indices(points, [](const ParetoPoint& p) { return p.x; },
                                   [](const ParetoPoint& p) { return p.y; });
  std::vector<ParetoPoint> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) out.push_back(points[i]);
  return out;
}

inline MetricSummary summarize(std::span<const double> xs) {
  MetricSummary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  s.mean = mean(xs);
  s.sd = sample_sd(xs);
  if (xs.size() >= 2) {
    const Interval ci = confidence_interval(xs, 0.95);
    s.ci_lo = ci.lo;
    s.ci_hi = ci.hi;
  } else {
    s.ci_lo = s.ci_hi = s.mean;
  }
  return s;
}

namespace detail {

inline std::optional<DelayQuantiles> delay_quantiles_of(std::span<const double> delays) {
  if (delays.empty()) return std::nullopt;
  const double qs[3] = {0.5, 0.9, 0.95};
  const auto v = quantiles(delays, qs);
  return DelayQuantiles{v[0], v[1], v[2]};
}

inline std::vector<double> pooled_delays(std::span<const TrialMetrics> trials) {
  std::vector<double> d;
  for (const auto& t : trials)
    for (const auto& r : t.high_severity_delays) d.push_back(r.delay);
  return d;
}

inline ConditionSummary summarize_cell(const TrialRecord& key, std::span<const TrialMetrics> trials) {
  ConditionSummary s;
  s.policy = key.policy;
  s.condition_index = key.condition_index;
  s.delta = key.delta;
  s.load = key.load;
  s.trials = trials.size();
  s.vector = metric_vector(trials);

  std::vector<double> rho, fail, w, dur;
  for (const auto& t : trials) {
    rho.push_back(t.rho);
    fail.push_back(t.aborted ? 1.0 : 0.0);
    w.push_back(t.workload);
    dur.push_back(t.duration);
  }
  const std::vector<double> delays = pooled_delays(trials);
  if (!delays.empty()) {
    s.t_int = summarize(delays);
    s.delay_quantiles = delay_quantiles_of(delays);
    s.delay_box = boxplot_stats(delays);
  }
  s.rho = summarize(rho);
  s.failure = summarize(fail);
  s.workload = summarize(w);
  s.duration = summarize(dur);
  s.workload_box = boxplot_stats(w);
  return s;
}

}  // namespace detail

/// Condition summaries, policy rollup and Pareto analysis from trial records.
/// Cells appear in order of first appearance in `trials`; records of a cell
/// keep their relative order.
inline SweepResult analyze(std::vector<TrialRecord> trials) {
  SweepResult r;
  std::vector<std::pair<std::size_t, PolicyId>> cell_order;
  std::map<std::pair<std::size_t, PolicyId>, std::vector<std::size_t>> cells;
  std::vector<PolicyId> policy_order;
  std::map<PolicyId, std::vector<std::size_t>> by_policy;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto key = std::make_pair(trials[i].condition_index, trials[i].policy);
    auto [it, fresh] = cells.try_emplace(key);
    if (fresh) cell_order.push_back(key);
    it->second.push_back(i);
    auto [pit, pfresh] = by_policy.try_emplace(trials[i].policy);
    if (pfresh) policy_order.push_back(trials[i].policy);
    pit->second.push_back(i);
  }

  auto gather = [&](const std::vector<std::size_t>& idx) {
    std::vector<TrialMetrics> m;
    m.reserve(idx.size());
    for (std::size_t i : idx) m.push_back(trials[i].metrics);
    return m;
  };

  std::vector<ParetoPoint> points;
  for (const auto& key : cell_order) {
    const auto& idx = cells.at(key);
    const auto m = gather(idx);
    r.summaries.push_back(detail::summarize_cell(trials[idx.front()], m));
    const ConditionSummary& s = r.summaries.back();
    points.push_back({s.policy, s.condition_index, s.delta, s.load, s.vector.T_int_mean, s.vector.R_fail,
                      effective_success(s.vector)});
  }

  for (PolicyId p : policy_order) {
    const auto m = gather(by_policy.at(p));
    PolicyRollup roll;
    roll.policy = p;
    roll.trials = m.size();
    roll.vector = metric_vector(m);
    double dur = 0.0;
    for (const auto& t : m) dur += t.duration;
    roll.mission_time = dur / static_cast<double>(m.size());
    roll.delay_quantiles = detail::delay_quantiles_of(detail::pooled_delays(m));
    r.rollup.push_back(roll);
  }

  // Per-condition fronts, in order of first appearance of each condition.
  std::vector<std::size_t> cond_order;
  for (const auto& p : points)
    if (std::find(cond_order.begin(), cond_order.end(), p.condition_index) == cond_order.end())
      cond_order.push_back(p.condition_index);
  for (std::size_t c : cond_order) {
    std::vector<ParetoPoint> group;
    for (const auto& p : points)
      if (p.condition_index == c) group.push_back(p);
    const auto keep = pareto_indices(std::span<const ParetoPoint>(group), [](const ParetoPoint& p) { return p.x; },
                                     [](const ParetoPoint& p) { return p.y; });
    for (std::size_t i = 0; i < group.size(); ++i)
      r.pareto.push_back({c, group[i], std::find(keep.begin(), keep.end(), i) != keep.end()});
  }
  const auto keep = pareto_indices(std::span<const ParetoPoint>(points), [](const ParetoPoint& p) { return p.x; },
                                   [](const ParetoPoint& p) { return p.y; });
  for (std::size_t i = 0; i < points.size(); ++i)
    r.pareto.push_back({std::nullopt, points[i], std::find(keep.begin(), keep.end(), i) != keep.end()});

  r.trials = std::move(trials);
  return r;
}

/// Validation failure naming the offending configuration key.
struct ConfigError : std::invalid_argument {
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

inline void validate(const SweepConfig& c) {
  if (c.degradation_levels.empty()) throw ConfigError("degradation_levels", "must not be empty");
  for (double d : c.degradation_levels)
    if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("degradation_levels", "values must lie in [0, 1]");
  if (c.patient_loads.empty()) throw ConfigError("patient_loads", "must not be empty");
  for (std::size_t n : c.patient_loads)
    if (n < 1) throw ConfigError("patient_loads", "values must be >= 1");
  if (c.policies.empty()) throw ConfigError("policies", "must not be empty");
  if (c.trials_per_condition < 1) throw ConfigError("trials_per_condition", "must be >= 1");
  if (c.trials_per_condition > kMaxTrials) throw ConfigError("trials_per_condition", "too large");
  if (c.condition_count() > kMaxConditions) throw ConfigError("degradation_levels", "too many conditions");
  if (!(c.metrics.tau_c > 0.0)) throw ConfigError("metrics.tau_c", "must be positive");
  if (c.metrics.alpha < 0.0) throw ConfigError("metrics.alpha", "must be non-negative");
  if (c.metrics.beta < 0.0) throw ConfigError("metrics.beta", "must be non-negative");
  try {
    validate(c.weights);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("weights", e.what());
  }
  try {
    validate(c.mission.platform);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("platform", e.what());
  }
  const auto& ops = c.mission.operators;
  if (!(ops.p_err >= 0.0 && ops.p_err <= 1.0)) throw ConfigError("operators.p_err", "must lie in [0, 1]");
  if (!(ops.q_dt >= 0.0 && ops.q_dt <= 1.0)) throw ConfigError("operators.q_dt", "must lie in [0, 1]");
  const auto& loc = c.mission.localization;
  if (!(loc.gps_sigma0 > 0.0)) throw ConfigError("localization.gps_sigma0", "must be positive");
  if (!(loc.gps_kappa > 0.0)) throw ConfigError("localization.gps_kappa", "must be positive");
  if (!(loc.auto_sigma > loc.gps_sigma0))
    throw ConfigError("localization.auto_sigma", "must exceed gps_sigma0");
  if (loc.auto_drift < 0.0) throw ConfigError("localization.auto_drift", "must be non-negative");
  if (loc.outage_rate_coeff < 0.0) throw ConfigError("localization.outage_rate_coeff", "must be non-negative");
  if (!(loc.outage_mean_duration > 0.0))
    throw ConfigError("localization.outage_mean_duration", "must be positive");
  const auto& sc = c.scenario;
  if (!(sc.area_extent > 0.0)) throw ConfigError("scenario.area_extent", "must be positive");
  if (!(sc.severity_alpha > 0.0 && sc.severity_beta > 0.0))
    throw ConfigError("scenario.severity_alpha", "beta shape parameters must be positive");
  if (!(sc.high_severity_threshold > 0.0 && sc.high_severity_threshold <= 1.0))
    throw ConfigError("scenario.high_severity_threshold", "must lie in (0, 1]");
  if (!(sc.ttc_max >= 0.0 && sc.ttc_offset > 0.0)) throw ConfigError("scenario.ttc_offset", "must be positive");
  if (!(sc.access_min > 0.0 && sc.access_min <= sc.access_max && sc.access_max <= 1.0))
    throw ConfigError("scenario.access_min", "need 0 < access_min <= access_max <= 1");
}

/// Runs one (condition, policy, trial) work item.
inline TrialRecord run_trial(const SweepConfig& cfg, std::size_t c, PolicyId policy, std::size_t t) {
  const Condition cond = cfg.condition(c);
  // Scenario and outage pattern are shared by all policies (policy index 0).
  Rng scenario_rng = derive_stream(cfg.master_seed, c, t, 0, StreamPurpose::scenario);
  const Scenario s = generate_scenario(cond, scenario_rng, cfg.scenario);
  Rng env_rng = derive_stream(cfg.master_seed, c, t, 0, StreamPurpose::environment);
  const DegradationProfile env =
      outage_schedule(cond.delta, cfg.mission.platform.horizon, env_rng, cfg.mission.localization);
  Rng mission_rng =
      derive_stream(cfg.master_seed, c, t, static_cast<std::uint64_t>(policy), StreamPurpose::mission);
  MissionTrace trace = run_mission(s, env, policy, cfg.mission, cfg.weights, mission_rng);
  trace.trial_index = t;
  TrialRecord rec;
  rec.policy = policy;
  rec.condition_index = c;
  rec.delta = cond.delta;
  rec.load = cond.patient_load;
  rec.trial = t;
  rec.abort_cause = trace.abort_cause;
  rec.metrics = trial_metrics(trace, s, cfg.metrics);
  return rec;
}

/// Full Monte Carlo sweep. Records are stored by (condition, policy, trial)
/// index, so the result does not depend on `workers` or on scheduling.
/// workers == 0 uses the hardware concurrency.
inline SweepResult run_sweep(const SweepConfig& cfg, std::size_t workers = 1) {
  validate(cfg);
  const std::size_t P = cfg.policies.size();
  const std::size_t T = cfg.trials_per_condition;
  const std::size_t total = cfg.total_missions();
  std::vector<TrialRecord> records(total);

  auto work = [&](std::size_t k) {
    const std::size_t c = k / (P * T);
    const std::size_t p = (k / T) % P;
    const std::size_t t = k % T;
    records[k] = run_trial(cfg, c, cfg.policies[p], t);
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, total);
  if (workers <= 1) {
    for (std::size_t k = 0; k < total; ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t k = next.fetch_add(1); k < total; k = next.fetch_add(1)) {
            try {
              work(k);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
              next.store(total);
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  return analyze(std::move(records));
}

}  // namespace medsim
