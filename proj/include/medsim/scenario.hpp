#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "medsim/random.hpp"

namespace medsim {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// One experimental cell: degradation severity and patient count.
struct Condition {
  std::size_t condition_id = 0;
  double delta = 0.0;
  std::size_t patient_load = 1;

  friend bool operator==(const Condition&, const Condition&) = default;
};

inline void validate(const Condition& c) {
  if (!(c.delta >= 0.0 && c.delta <= 1.0))
    throw std::invalid_argument("condition delta must lie in [0, 1], got " + std::to_string(c.delta));
  if (c.patient_load < 1) throw std::invalid_argument("condition patient_load must be >= 1");
}

using PatientId = std::uint32_t;

struct Patient {
  PatientId id = 0;
  Point position;
  double severity = 0.0;             // [0, 1]
  double detect_time = 0.0;          // minutes
  double time_to_criticality = 1.0;  // minutes, > 0
  double accessibility = 1.0;        // (0, 1]
  bool high_severity = false;

  friend bool operator==(const Patient&, const Patient&) = default;
};

/// Patient-field distributions. Defaults: Beta(2,2) severity, Delta linear in
/// severity, accessibility uniform on [0.2, 1].
struct ScenarioParams {
  double area_extent = 10000.0;  // m, square side
  Point base{0.0, 0.0};
  double severity_alpha = 2.0;
  double severity_beta = 2.0;
  double high_severity_threshold = 0.7;
  double ttc_max = 240.0;     // min
  double ttc_offset = 10.0;   // min
  double access_min = 0.2;
  double access_max = 1.0;

  friend bool operator==(const ScenarioParams&, const ScenarioParams&) = default;
};

struct Scenario {
  Condition condition;
  std::vector<Patient> patients;
  Point base_position;
  double area_extent = 0.0;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Inclusive threshold: severity == threshold counts as high severity.
inline bool classify_high_severity(const Patient& p, double threshold) {
  return p.severity >= threshold;
}

enum class StreamPurpose : std::uint8_t { scenario = 0, environment = 1, mission = 2 };

/// Bounds of the packed stream key; derive_stream rejects anything larger.
inline constexpr std::uint64_t kMaxConditions = 1ULL << 16;
inline constexpr std::uint64_t kMaxTrials = 1ULL << 24;
inline constexpr std::uint64_t kMaxPolicies = 1ULL << 8;

/// Seed of the independent stream for one (condition, trial, policy, purpose).
///
/// The four indices are packed into 56 bits, so distinct keys are distinct
/// integers; the seed is mix64(mix64(master) + key) and mix64 is a bijection,
/// so for a fixed master seed no two keys share a stream.
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t condition_index,
                                 std::uint64_t trial_index, std::uint64_t policy_index,
                                 StreamPurpose purpose) {
  if (condition_index >= kMaxConditions || trial_index >= kMaxTrials || policy_index >= kMaxPolicies)
    throw std::out_of_range("derive_stream: index outside the sweep domain");
  const std::uint64_t key = (condition_index << 40) | (trial_index << 16) | (policy_index << 8) |
                            static_cast<std::uint64_t>(purpose);
  return mix64(mix64(master_seed) + key);
}

inline Rng derive_stream(std::uint64_t master_seed, std::uint64_t condition_index,
                         std::uint64_t trial_index, std::uint64_t policy_index,
                         StreamPurpose purpose) {
  return Rng(stream_seed(master_seed, condition_index, trial_index, policy_index, purpose));
}

/// Samples a patient field for `condition`. All patients are detected at t = 0.
inline Scenario generate_scenario(const Condition& condition, Rng& rng,
                                  const ScenarioParams& params = {}) {
  validate(condition);
  Scenario s;
  s.condition = condition;
  s.base_position = params.base;
  s.area_extent = params.area_extent;
  s.patients.reserve(condition.patient_load);
  for (std::size_t i = 0; i < condition.patient_load; ++i) {
    Patient p;
    p.id = static_cast<PatientId>(i);
    p.position = {rng.uniform(0.0, params.area_extent), rng.uniform(0.0, params.area_extent)};
    p.severity = rng.beta(params.severity_alpha, params.severity_beta);
    p.detect_time = 0.0;
    p.time_to_criticality = params.ttc_max * (1.0 - p.severity) + params.ttc_offset;
    p.accessibility = rng.uniform(params.access_min, params.access_max);
    p.high_severity = classify_high_severity(p, params.high_severity_threshold);
    s.patients.push_back(p);
  }
  return s;
}

}  // namespace medsim
