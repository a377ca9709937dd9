#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "medsim/random.hpp"
#include "medsim/scenario.hpp"

namespace medsim {

enum class PolicyId : std::uint8_t { pi1_teleop = 0, pi2_auto = 1, pi3_geodt = 2 };

inline constexpr std::array<PolicyId, 3> kAllPolicies{PolicyId::pi1_teleop, PolicyId::pi2_auto,
                                                      PolicyId::pi3_geodt};

inline std::string_view to_string(PolicyId p) {
  switch (p) {
    case PolicyId::pi1_teleop: return "pi1_teleop";
    case PolicyId::pi2_auto: return "pi2_auto";
    case PolicyId::pi3_geodt: return "pi3_geodt";
  }
  return "unknown";
}

inline std::optional<PolicyId> parse_policy(std::string_view name) {
  for (PolicyId p : kAllPolicies)
    if (to_string(p) == name) return p;
  return std::nullopt;
}

struct VisitPlan {
  std::vector<PatientId> order;

  friend bool operator==(const VisitPlan&, const VisitPlan&) = default;
};

/// True iff `plan` visits every patient of `scenario` exactly once.
inline bool is_permutation_of(const VisitPlan& plan, const Scenario& scenario) {
  if (plan.order.size() != scenario.patients.size()) return false;
  std::vector<bool> seen(scenario.patients.size(), false);
  for (PatientId id : plan.order) {
    if (id >= seen.size() || seen[id]) return false;
    seen[id] = true;
  }
  return true;
}

struct TriageWeights {
  double w_s = 1.0;      // severity
  double w_u = 1.0;      // urgency, exp(-Delta / delta0)
  double w_a = 0.5;      // accessibility
  double delta0 = 60.0;  // min

  friend bool operator==(const TriageWeights&, const TriageWeights&) = default;
};

inline void validate(const TriageWeights& w) {
  if (w.w_s < 0.0 || w.w_u < 0.0 || w.w_a < 0.0)
    throw std::invalid_argument("triage weights must be non-negative");
  if (!(w.w_s + w.w_u + w.w_a > 0.0)) throw std::invalid_argument("triage weights must not all be zero");
  if (!(w.delta0 > 0.0)) throw std::invalid_argument("triage delta0 must be positive");
}

namespace detail {

/// Index into `remaining` of the patient nearest to `from`; ties go to the lower id.
inline std::size_t nearest(const Scenario& s, const std::vector<PatientId>& remaining, Point from) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < remaining.size(); ++k) {
    const double d = distance(from, s.patients[remaining[k]].position);
    if (d < best_d || (d == best_d && remaining[k] < remaining[best])) {
      best = k;
      best_d = d;
    }
  }
  return best;
}

inline std::vector<PatientId> all_ids(const Scenario& s) {
  std::vector<PatientId> ids(s.patients.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = s.patients[i].id;
  return ids;
}

}  // namespace detail

/// Deterministic nearest-neighbour tour from the base.
inline VisitPlan order_heuristic(const Scenario& s) {
  VisitPlan plan;
  std::vector<PatientId> remaining = detail::all_ids(s);
  Point at = s.base_position;
  while (!remaining.empty()) {
    const std::size_t k = detail::nearest(s, remaining, at);
    plan.order.push_back(remaining[k]);
    at = s.patients[remaining[k]].position;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return plan;
}

/// Operator-discretion ordering: nearest unvisited patient, except that with
/// probability p_err the operator picks a uniformly random unvisited one.
/// One uniform draw is consumed per step whether or not an error occurs.
inline VisitPlan order_teleop(const Scenario& s, Rng& rng, double p_err) {
  VisitPlan plan;
  std::vector<PatientId> remaining = detail::all_ids(s);
  Point at = s.base_position;
  while (!remaining.empty()) {
    const bool error = rng.uniform() < p_err;
    const std::size_t k = error ? static_cast<std::size_t>(rng.index(remaining.size()))
                                : detail::nearest(s, remaining, at);
    plan.order.push_back(remaining[k]);
    at = s.patients[remaining[k]].position;
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return plan;
}

/// Priority score: w_s s + w_u exp(-Delta / delta0) + w_a a.
inline double triage_score(const Patient& p, const TriageWeights& w) {
  return w.w_s * p.severity + w.w_u * std::exp(-p.time_to_criticality / w.delta0) +
         w.w_a * p.accessibility;
}

/// Highest priority first; equal scores go to the lower id.
inline VisitPlan order_triage(const Scenario& s, const TriageWeights& w) {
  struct Ranked {
    double score;
    PatientId id;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(s.patients.size());
  for (const Patient& p : s.patients) ranked.push_back({triage_score(p, w), p.id});
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  VisitPlan plan;
  plan.order.reserve(ranked.size());
  for (const Ranked& r : ranked) plan.order.push_back(r.id);
  return plan;
}

}  // namespace medsim
