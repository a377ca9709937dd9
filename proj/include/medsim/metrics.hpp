#pragma once

#include <cstddef>
#include <numeric>
#include <optional>
#include <ranges>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "medsim/engine.hpp"
#include "medsim/scenario.hpp"

namespace medsim {

struct DelayRecord {
  PatientId patient = 0;
  double delay = 0.0;  // minutes from detection to first intervention
  bool censored = false;

  friend bool operator==(const DelayRecord&, const DelayRecord&) = default;
};

struct MetricParams {
  double tau_c = 60.0;  // min
  double alpha = 1.0;
  double beta = 1.0;

  friend bool operator==(const MetricParams&, const MetricParams&) = default;
};

struct TrialMetrics {
  std::vector<DelayRecord> high_severity_delays;
  std::size_t served_count = 0;
  std::size_t total_patients = 0;
  double rho = 0.0;
  bool aborted = false;
  double lambda_sw = 0.0;
  double lambda_int = 0.0;
  double workload = 0.0;
  double duration = 0.0;

  friend bool operator==(const TrialMetrics&, const TrialMetrics&) = default;
};

/// Cell-level metric vector. `delay_count` is the number of pooled
/// high-severity delays behind T_int_mean; when it is zero T_int_mean is 0.
struct MetricVector {
  double T_int_mean = 0.0;
  double rho = 0.0;
  double R_fail = 0.0;
  double W_mean = 0.0;
  std::size_t delay_count = 0;

  friend bool operator==(const MetricVector&, const MetricVector&) = default;
};

/// Time of the first intervene event per patient.
inline std::unordered_map<PatientId, double> first_interventions(const MissionTrace& trace) {
  std::unordered_map<PatientId, double> first;
  for (const MissionEvent& e : trace.events)
    if (e.kind == EventKind::intervene && e.patient) first.try_emplace(*e.patient, e.time);
  return first;
}

/// Delay of every high-severity patient. Patients never reached are
/// censored at the mission end.
inline std::vector<DelayRecord> intervention_delays(const MissionTrace& trace, const Scenario& scenario) {
  const auto first = first_interventions(trace);
  std::vector<DelayRecord> out;
  for (const Patient& p : scenario.patients) {
    if (!p.high_severity) continue;
    if (auto it = first.find(p.id); it != first.end())
      out.push_back({p.id, it->second - p.detect_time, false});
    else
      out.push_back({p.id, trace.duration - p.detect_time, true});
  }
  return out;
}

struct ServedCount {
  std::size_t count = 0;
  double rho = 0.0;
};

/// Patients whose first intervention came within tau_c of detection (inclusive).
inline ServedCount served_within_window(const MissionTrace& trace, const Scenario& scenario, double tau_c) {
  if (!(tau_c > 0.0)) throw std::invalid_argument("served_within_window: tau_c must be positive");
  const auto first = first_interventions(trace);
  ServedCount out;
  for (const Patient& p : scenario.patients) {
    auto it = first.find(p.id);
    if (it != first.end() && it->second - p.detect_time <= tau_c) ++out.count;
  }
  out.rho = scenario.patients.empty() ? 0.0
                                      : static_cast<double>(out.count) /
                                            static_cast<double>(scenario.patients.size());
  return out;
}

template <std::ranges::input_range R>
  requires std::convertible_to<std::ranges::range_value_t<R>, bool>
double failure_rate(const R& aborted_flags) {
  std::size_t n = 0, failed = 0;
  for (bool f : aborted_flags) {
    ++n;
    failed += f ? 1 : 0;
  }
  if (n == 0) throw std::invalid_argument("failure_rate: no missions");
  return static_cast<double>(failed) / static_cast<double>(n);
}

/// Label changes in the operator's task sequence per minute.
inline double task_switch_rate(const MissionTrace& trace) {
  if (!(trace.duration > 0.0)) return 0.0;
  std::size_t changes = 0;
  TaskLabel current = trace.initial_task;
  for (const MissionEvent& e : trace.events) {
    if (e.kind != EventKind::task_switch || !e.task) continue;
    if (*e.task != current) ++changes;
    current = *e.task;
  }
  return static_cast<double>(changes) / trace.duration;
}

inline double intervention_frequency(const MissionTrace& trace) {
  if (!(trace.duration > 0.0)) return 0.0;
  std::size_t n = 0;
  for (const MissionEvent& e : trace.events) n += e.kind == EventKind::operator_intervention ? 1 : 0;
  return static_cast<double>(n) / trace.duration;
}

inline double workload(double lambda_sw, double lambda_int, double alpha, double beta) {
  if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("workload: weights must be non-negative");
  return alpha * lambda_sw + beta * lambda_int;
}

/// Mean workload over operators (one operator per mission).
inline double aggregate_workload(std::span<const double> per_trial) {
  if (per_trial.empty()) throw std::invalid_argument("aggregate_workload: no trials");
  return std::accumulate(per_trial.begin(), per_trial.end(), 0.0) / static_cast<double>(per_trial.size());
}

inline TrialMetrics trial_metrics(const MissionTrace& trace, const Scenario& scenario, const MetricParams& mp) {
  TrialMetrics m;
  m.high_severity_delays = intervention_delays(trace, scenario);
  const ServedCount served = served_within_window(trace, scenario, mp.tau_c);
  m.served_count = served.count;
  m.total_patients = scenario.patients.size();
  m.rho = served.rho;
  m.aborted = trace.aborted;
  m.lambda_sw = task_switch_rate(trace);
  m.lambda_int = intervention_frequency(trace);
  m.workload = workload(m.lambda_sw, m.lambda_int, mp.alpha, mp.beta);
  m.duration = trace.duration;
  return m;
}

/// Cell aggregate: pooled high-severity delay mean (censored included), mean
/// per-trial rho, failure rate, mean workload.
inline MetricVector metric_vector(std::span<const TrialMetrics> trials) {
  if (trials.empty()) throw std::invalid_argument("metric_vector: no trials");
  MetricVector v;
  double delay_sum = 0.0, rho_sum = 0.0;
  std::vector<double> w;
  std::vector<bool> aborted;
  w.reserve(trials.size());
  aborted.reserve(trials.size());
  for (const TrialMetrics& t : trials) {
    for (const DelayRecord& d : t.high_severity_delays) delay_sum += d.delay;
    v.delay_count += t.high_severity_delays.size();
    rho_sum += t.rho;
    w.push_back(t.workload);
    aborted.push_back(t.aborted);
  }
  v.T_int_mean = v.delay_count ? delay_sum / static_cast<double>(v.delay_count) : 0.0;
  v.rho = rho_sum / static_cast<double>(trials.size());
  v.R_fail = failure_rate(aborted);
  v.W_mean = aggregate_workload(w);
  return v;
}

/// Strict component-wise dominance on [T_int, 1 - rho, R_fail, W] (all minimised).
inline bool dominates(const MetricVector& a, const MetricVector& b) {
  const double ca[4] = {a.T_int_mean, 1.0 - a.rho, a.R_fail, a.W_mean};
  const double cb[4] = {b.T_int_mean, 1.0 - b.rho, b.R_fail, b.W_mean};
  bool strict = false;
  for (int i = 0; i < 4; ++i) {
    if (ca[i] > cb[i]) return false;
    if (ca[i] < cb[i]) strict = true;
  }
  return strict;
}

}  // namespace medsim
