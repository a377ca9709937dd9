#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "medsim/localization.hpp"
#include "medsim/policy.hpp"
#include "medsim/random.hpp"
#include "medsim/scenario.hpp"

namespace medsim {

/// Operator task alphabet. Teleoperation cycles navigate/assess/intervene;
/// supervisory operators sit in supervise and move to respond on alerts.
enum class TaskLabel : std::uint8_t { navigate, assess, intervene, supervise, respond };

inline std::string_view to_string(TaskLabel t) {
  switch (t) {
    case TaskLabel::navigate: return "navigate";
    case TaskLabel::assess: return "assess";
    case TaskLabel::intervene: return "intervene";
    case TaskLabel::supervise: return "supervise";
    case TaskLabel::respond: return "respond";
  }
  return "unknown";
}

enum class EventKind : std::uint8_t {
  depart,
  arrive,
  intervene,
  task_switch,
  operator_intervention,
  abort,
  complete,
};

enum class AbortCause : std::uint8_t { none, comm_loss, uncertainty, horizon, localization_loss };

inline std::string_view to_string(AbortCause c) {
  switch (c) {
    case AbortCause::none: return "none";
    case AbortCause::comm_loss: return "comm_loss";
    case AbortCause::uncertainty: return "uncertainty";
    case AbortCause::horizon: return "horizon";
    case AbortCause::localization_loss: return "localization_loss";
  }
  return "unknown";
}

struct MissionEvent {
  double time = 0.0;
  EventKind kind = EventKind::depart;
  std::optional<PatientId> patient;
  std::optional<TaskLabel> task;

  friend bool operator==(const MissionEvent&, const MissionEvent&) = default;
};

struct MissionTrace {
  PolicyId policy = PolicyId::pi1_teleop;
  Condition condition;
  std::size_t trial_index = 0;
  TaskLabel initial_task = TaskLabel::supervise;
  std::vector<MissionEvent> events;
  double duration = 0.0;
  bool aborted = false;
  AbortCause abort_cause = AbortCause::none;

  friend bool operator==(const MissionTrace&, const MissionTrace&) = default;
};

struct PlatformParams {
  double cruise_speed = 1500.0;         // m/min
  double service_time = 5.0;            // min
  double teleop_speed_factor = 0.2;     // (0, 1]
  double uncertainty_threshold = 400.0; // m^2, covariance trace
  double abort_grace = 2.0;             // min
  double comm_timeout = 3.0;            // min
  double gamma_u = 0.5;
  double distance_ref = 100.0;          // m
  double horizon = 900.0;               // min
  double tick = 1.0;                    // min

  friend bool operator==(const PlatformParams&, const PlatformParams&) = default;
};

struct OperatorParams {
  double p_err = 0.15;  // teleoperator ordering error probability
  double q_dt = 0.5;    // fraction of alerts the twin resolves without the operator

  friend bool operator==(const OperatorParams&, const OperatorParams&) = default;
};

struct MissionParams {
  PlatformParams platform;
  LocalizationParams localization;
  OperatorParams operators;

  friend bool operator==(const MissionParams&, const MissionParams&) = default;
};

inline void validate(const PlatformParams& p) {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("platform.") + key + " must be positive");
  };
  positive(p.cruise_speed, "cruise_speed");
  positive(p.service_time, "service_time");
  positive(p.teleop_speed_factor, "teleop_speed_factor");
  positive(p.uncertainty_threshold, "uncertainty_threshold");
  positive(p.abort_grace, "abort_grace");
  positive(p.comm_timeout, "comm_timeout");
  positive(p.gamma_u, "gamma_u");
  positive(p.distance_ref, "distance_ref");
  positive(p.horizon, "horizon");
  positive(p.tick, "tick");
  if (p.teleop_speed_factor > 1.0)
    throw std::invalid_argument("platform.teleop_speed_factor must be <= 1");
}

/// Ground speed (m/min) given per-axis pose variance and destination accessibility.
inline double effective_speed(double pose_variance, double accessibility, const PlatformParams& p) {
  if (!(accessibility > 0.0)) throw std::invalid_argument("travel: accessibility must be positive");
  return p.cruise_speed * accessibility /
         (1.0 + p.gamma_u * std::sqrt(std::max(0.0, pose_variance)) / p.distance_ref);
}

/// (d / speed) (1 + gamma_u sqrt(var) / d_ref) / a.
inline double travel_time(Point from, Point to, double pose_variance, double accessibility,
                          const PlatformParams& p) {
  const double v = effective_speed(pose_variance, accessibility, p);
  return distance(from, to) / v;
}

/// Digital-twin world state carried by the mission.
struct TwinState {
  PoseEstimate pose;
  std::vector<PatientId> remaining_plan;
  std::vector<Patient> patients;  // severity/position snapshot
  bool platform_healthy = true;
};

/// What the operator sees at a tick.
struct OperatorView {
  PoseEstimate pose;
  TaskLabel task = TaskLabel::supervise;
  int pending_alerts = 0;
};

/// Abort rule. Teleoperation fails on a link outage longer than the comm
/// timeout; the autonomous policies fail when the covariance trace has been
/// over threshold for longer than the grace period.
inline bool check_abort(const TwinState& twin, double elapsed_outage, double elapsed_over_threshold,
                        PolicyId policy, const PlatformParams& params) {
  if (!twin.platform_healthy) return true;
  if (policy == PolicyId::pi1_teleop) return elapsed_outage > params.comm_timeout;
  return elapsed_over_threshold > params.abort_grace;
}

enum class AlertKind : std::uint8_t { link_loss, uncertainty };

/// Operator task/intervention event generator for one mission.
///
/// Teleoperation: the task label follows the mission phase and every leg
/// starts with a manual control action. Supervisory policies: the operator
/// is pulled into `respond` only by alerts; under pi3 a fraction q_dt of
/// alerts is absorbed by the twin and never reaches the operator.
class OperatorConsole {
 public:
  OperatorConsole(PolicyId policy, const OperatorParams& params, std::vector<MissionEvent>& sink)
      : policy_(policy),
        params_(params),
        sink_(sink),
        task_(policy == PolicyId::pi1_teleop ? TaskLabel::navigate : TaskLabel::supervise) {}

  TaskLabel task() const { return task_; }
  int pending() const { return static_cast<int>(link_pending_) + static_cast<int>(uncertainty_pending_); }

  // Mission phases (teleoperation only).
  void on_depart(double t) {
    if (policy_ != PolicyId::pi1_teleop) return;
    switch_to(TaskLabel::navigate, t);
    sink_.push_back({t, EventKind::operator_intervention, std::nullopt, std::nullopt});
  }
  void on_arrive(double t) {
    if (policy_ == PolicyId::pi1_teleop) switch_to(TaskLabel::assess, t);
  }
  void on_treatment(double t) {
    if (policy_ == PolicyId::pi1_teleop) switch_to(TaskLabel::intervene, t);
  }

  /// Returns true when the alert reaches the operator, false when the twin absorbs it.
  bool raise(AlertKind kind, double t, Rng& rng) {
    if (policy_ == PolicyId::pi1_teleop) return true;
    if (policy_ == PolicyId::pi3_geodt && rng.uniform() < params_.q_dt) return false;
    (kind == AlertKind::link_loss ? link_pending_ : uncertainty_pending_) = true;
    switch_to(TaskLabel::respond, t);
    return true;
  }

  void resolve(AlertKind kind, double t, bool by_intervention) {
    bool& flag = kind == AlertKind::link_loss ? link_pending_ : uncertainty_pending_;
    if (!flag) return;
    flag = false;
    if (by_intervention) sink_.push_back({t, EventKind::operator_intervention, std::nullopt, std::nullopt});
    if (!link_pending_ && !uncertainty_pending_) switch_to(TaskLabel::supervise, t);
  }

  bool is_pending(AlertKind kind) const {
    return kind == AlertKind::link_loss ? link_pending_ : uncertainty_pending_;
  }

 private:
  void switch_to(TaskLabel next, double t) {
    if (next == task_) return;
    task_ = next;
    sink_.push_back({t, EventKind::task_switch, std::nullopt, next});
  }

  PolicyId policy_;
  OperatorParams params_;
  std::vector<MissionEvent>& sink_;
  TaskLabel task_;
  bool link_pending_ = false;
  bool uncertainty_pending_ = false;
};

namespace detail {

/// Time-stepped execution of one visit plan.
class MissionRun {
 public:
  MissionRun(const Scenario& s, const DegradationProfile& env, PolicyId policy, const MissionParams& mp,
             Rng& rng)
      : s_(s),
        env_(env),
        policy_(policy),
        mp_(mp),
        rng_(rng),
        console_(policy, mp.operators, trace_.events) {
    trace_.policy = policy;
    trace_.condition = s.condition;
    trace_.initial_task = console_.task();
    twin_.patients = s.patients;
    position_ = s.base_position;
    anchor_variance_ = mp.localization.auto_variance();
  }

  MissionTrace run(const VisitPlan& plan) {
    twin_.remaining_plan = plan.order;
    if (plan.order.empty()) return finish(EventKind::complete);
    if (!tick()) return std::move(trace_);
    for (PatientId id : plan.order) {
      const Patient& p = s_.patients.at(id);
      emit(EventKind::depart, id);
      console_.on_depart(t_);
      if (!travel_to(p)) return std::move(trace_);
      emit(EventKind::arrive, id);
      emit(EventKind::intervene, id);
      console_.on_arrive(t_);
      twin_.remaining_plan.erase(twin_.remaining_plan.begin());
      const double start = t_;
      if (!wait_until(start + 0.5 * mp_.platform.service_time)) return std::move(trace_);
      console_.on_treatment(t_);
      if (!wait_until(start + mp_.platform.service_time)) return std::move(trace_);
    }
    return finish(EventKind::complete);
  }

 private:
  double next_tick_time() const { return static_cast<double>(tick_index_ + 1) * mp_.platform.tick; }

  void emit(EventKind kind, std::optional<PatientId> id = std::nullopt) {
    trace_.events.push_back({t_, kind, id, std::nullopt});
  }

  MissionTrace finish(EventKind terminal) {
    close(terminal, AbortCause::none);
    return std::move(trace_);
  }

  void close(EventKind terminal, AbortCause cause) {
    emit(terminal);
    trace_.duration = t_;
    trace_.aborted = terminal == EventKind::abort;
    trace_.abort_cause = cause;
  }

  bool abort(AbortCause cause) {
    close(EventKind::abort, cause);
    done_ = true;
    return false;
  }

  /// Moves toward `p`, processing every tick crossed. False on abort.
  bool travel_to(const Patient& p) {
    const Point from = position_;
    const double leg = distance(from, p.position);
    double remaining = leg;
    while (remaining > 0.0) {
      const double v = speed_toward(p);
      const double horizon_t = next_tick_time();
      const double reach = v * (horizon_t - t_);
      if (v > 0.0 && remaining <= reach) {
        t_ += remaining / v;
        remaining = 0.0;
        break;
      }
      remaining -= reach;
      t_ = horizon_t;
      const double f = 1.0 - remaining / leg;
      position_ = {from.x + f * (p.position.x - from.x), from.y + f * (p.position.y - from.y)};
      ++tick_index_;
      if (!tick()) return false;
    }
    position_ = p.position;
    return true;
  }

  /// Stays on site until `until`, processing ticks. False on abort.
  bool wait_until(double until) {
    while (next_tick_time() <= until) {
      t_ = next_tick_time();
      ++tick_index_;
      if (!tick()) return false;
    }
    t_ = until;
    return true;
  }

  double speed_toward(const Patient& p) const {
    if (policy_ == PolicyId::pi1_teleop) {
      if (!link_up_) return 0.0;  // teleoperated platform holds while the link is down
      return mp_.platform.teleop_speed_factor *
             effective_speed(twin_.pose.covariance.axis_variance(), p.accessibility, mp_.platform);
    }
    return effective_speed(twin_.pose.covariance.axis_variance(), p.accessibility, mp_.platform);
  }

  void update_estimate() {
    const auto& loc = mp_.localization;
    const double since_anchor = t_ - anchor_time_;
    switch (policy_) {
      case PolicyId::pi1_teleop: {
        twin_.pose = gps_estimate(position_, env_, t_, rng_, loc);
        break;
      }
      case PolicyId::pi2_auto: {
        twin_.pose = auto_estimate(position_, since_anchor, rng_, loc, anchor_variance_);
        break;
      }
      case PolicyId::pi3_geodt: {
        const PoseEstimate inertial = auto_estimate(position_, since_anchor, rng_, loc, anchor_variance_);
        const PoseEstimate gps = gps_estimate(position_, env_, t_, rng_, loc);
        twin_.pose = dt_fused_estimate(gps, inertial);
        // The fused state re-anchors the inertial propagation.
        anchor_time_ = t_;
        anchor_variance_ = twin_.pose.covariance.axis_variance();
        break;
      }
    }
  }

  void reanchor() {
    anchor_time_ = t_;
    anchor_variance_ = mp_.localization.auto_variance();
    update_estimate();
  }

  /// Per-tick bookkeeping at time t_: estimator, alerts, abort rules.
  bool tick() {
    if (done_) return false;
    const auto outage = env_.outage_at(t_);
    link_up_ = !outage.has_value();
    try {
      update_estimate();
    } catch (const LocalizationLoss&) {
      return abort(AbortCause::localization_loss);
    }

    if (policy_ != PolicyId::pi1_teleop) {
      if (outage && outage->start > last_outage_start_) {
        last_outage_start_ = outage->start;
        console_.raise(AlertKind::link_loss, t_, rng_);
      } else if (link_up_) {
        console_.resolve(AlertKind::link_loss, t_, false);
      }

      const double threshold = mp_.platform.uncertainty_threshold;
      bool over = twin_.pose.covariance.trace() > threshold;
      if (over && !over_since_) {
        over_since_ = t_;
        if (!console_.raise(AlertKind::uncertainty, t_, rng_)) {
          reanchor();  // twin resolves it via visual geolocalization
          over = twin_.pose.covariance.trace() > threshold;
          if (!over) over_since_.reset();
        }
      } else if (over && link_up_ && console_.is_pending(AlertKind::uncertainty) && *over_since_ < t_) {
        console_.resolve(AlertKind::uncertainty, t_, true);
        reanchor();
        over = twin_.pose.covariance.trace() > threshold;
      }
      if (!over) {
        over_since_.reset();
        console_.resolve(AlertKind::uncertainty, t_, false);
      }
    }

    const double elapsed_outage = outage ? t_ - outage->start : 0.0;
    const double elapsed_over = over_since_ ? t_ - *over_since_ : 0.0;
    if (check_abort(twin_, elapsed_outage, elapsed_over, policy_, mp_.platform)) {
      return abort(policy_ == PolicyId::pi1_teleop ? AbortCause::comm_loss : AbortCause::uncertainty);
    }
    if (t_ >= mp_.platform.horizon) return abort(AbortCause::horizon);
    return true;
  }

  const Scenario& s_;
  const DegradationProfile& env_;
  PolicyId policy_;
  const MissionParams& mp_;
  Rng& rng_;
  MissionTrace trace_;
  OperatorConsole console_;
  TwinState twin_;

  double t_ = 0.0;
  std::int64_t tick_index_ = 0;
  Point position_;
  bool link_up_ = true;
  bool done_ = false;
  double anchor_time_ = 0.0;
  double anchor_variance_ = 0.0;
  double last_outage_start_ = -1.0;
  std::optional<double> over_since_;
};

}  // namespace detail

inline VisitPlan plan_for(const Scenario& s, PolicyId policy, const TriageWeights& weights,
                          const OperatorParams& ops, Rng& rng) {
  switch (policy) {
    case PolicyId::pi1_teleop: return order_teleop(s, rng, ops.p_err);
    case PolicyId::pi2_auto: return order_heuristic(s);
    case PolicyId::pi3_geodt: return order_triage(s, weights);
  }
  throw std::invalid_argument("unknown policy");
}

/// Executes one mission against a given outage pattern.
inline MissionTrace run_mission(const Scenario& s, const DegradationProfile& env, PolicyId policy,
                                const MissionParams& params, const TriageWeights& weights, Rng& rng) {
  const VisitPlan plan = plan_for(s, policy, weights, params.operators, rng);
  return detail::MissionRun(s, env, policy, params, rng).run(plan);
}

/// Executes one mission, drawing its outage pattern from `rng` first.
inline MissionTrace run_mission(const Scenario& s, PolicyId policy, const MissionParams& params,
                                const TriageWeights& weights, Rng& rng) {
  const DegradationProfile env =
      outage_schedule(s.condition.delta, params.platform.horizon, rng, params.localization);
  return run_mission(s, env, policy, params, weights, rng);
}

}  // namespace medsim
