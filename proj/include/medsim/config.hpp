#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "medsim/experiment.hpp"

namespace medsim {

using json = nlohmann::json;

/// Command-line overrides. Unset members leave the file/default value alone.
struct ConfigOverrides {
  std::optional<std::uint64_t> master_seed;
  std::optional<std::size_t> trials;
  std::optional<std::vector<double>> degradation_levels;
  std::optional<std::vector<std::size_t>> patient_loads;
  std::optional<std::vector<std::string>> policies;
  std::optional<double> tau_c;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> w_s;
  std::optional<double> w_u;
  std::optional<double> w_a;
  std::optional<double> delta0;
};

namespace detail {

template <class T>
T read_value(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "wrong type");
  }
}

/// Applies the numeric members of `j` (an object) to the named fields.
/// Unknown members are rejected with their full key path.
template <class Fields>
void apply_object(const json& j, const std::string& prefix, Fields&& fields) {
  if (!j.is_object()) throw ConfigError(prefix, "expected an object");
  for (const auto& [name, value] : j.items()) {
    const std::string key = prefix + "." + name;
    if (!fields(name, value, key)) throw ConfigError(key, "unknown key");
  }
}

#define MEDSIM_FIELD(obj, field)                          \
  if (name == #field) {                                   \
    obj.field = read_value<decltype(obj.field)>(value, key); \
    return true;                                          \
  }

inline std::vector<PolicyId> parse_policies(const std::vector<std::string>& names, const std::string& key) {
  std::vector<PolicyId> out;
  for (const auto& n : names) {
    auto p = parse_policy(n);
    if (!p) throw ConfigError(key, "unknown policy '" + n + "'");
    out.push_back(*p);
  }
  return out;
}

}  // namespace detail

/// Overlays the members present in `j` onto `cfg`.
inline void apply_json(SweepConfig& cfg, const json& j) {
  using detail::read_value;
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  for (const auto& [name, value] : j.items()) {
    if (name == "master_seed") {
      cfg.master_seed = read_value<std::uint64_t>(value, name);
    } else if (name == "degradation_levels") {
      cfg.degradation_levels = read_value<std::vector<double>>(value, name);
    } else if (name == "patient_loads") {
      cfg.patient_loads = read_value<std::vector<std::size_t>>(value, name);
    } else if (name == "policies") {
      cfg.policies = detail::parse_policies(read_value<std::vector<std::string>>(value, name), name);
    } else if (name == "trials_per_condition") {
      cfg.trials_per_condition = read_value<std::size_t>(value, name);
    } else if (name == "metrics") {
      auto& m = cfg.metrics;
      detail::apply_object(value, name, [&](const std::string& name, const json& value, const std::string& key) {
        MEDSIM_FIELD(m, tau_c) MEDSIM_FIELD(m, alpha) MEDSIM_FIELD(m, beta) return false;
      });
    } else if (name == "weights") {
      auto& w = cfg.weights;
      detail::apply_object(value, name, [&](const std::string& name, const json& value, const std::string& key) {
        MEDSIM_FIELD(w, w_s) MEDSIM_FIELD(w, w_u) MEDSIM_FIELD(w, w_a) MEDSIM_FIELD(w, delta0) return false;
      });
    } else if (name == "platform") {
      auto& p = cfg.mission.platform;
      detail::apply_object(value, name, [&](const std::string& name, const json& value, const std::string& key) {
        MEDSIM_FIELD(p, cruise_speed) MEDSIM_FIELD(p, service_time) MEDSIM_FIELD(p, teleop_speed_factor)
        MEDSIM_FIELD(p, uncertainty_threshold) MEDSIM_FIELD(p, abort_grace) MEDSIM_FIELD(p, comm_timeout)
        MEDSIM_FIELD(p, gamma_u) MEDSIM_FIELD(p, distance_ref) MEDSIM_FIELD(p, horizon) MEDSIM_FIELD(p, tick)
        return false;
      });
    } else if (name == "localization") {
      auto& l = cfg.mission.localization;
      detail::apply_object(value, name, [&](const std::string& name, const json& value, const std::string& key) {
        MEDSIM_FIELD(l, gps_sigma0) MEDSIM_FIELD(l, gps_kappa) MEDSIM_FIELD(l, auto_sigma)
        MEDSIM_FIELD(l, auto_drift) MEDSIM_FIELD(l, outage_rate_coeff) MEDSIM_FIELD(l, outage_mean_duration)
        return false;
      });
    } else if (name == "operators") {
      auto& o = cfg.mission.operators;
      detail::apply_object(value, name, [&](const std::string& name, const json& value, const std::string& key) {
        MEDSIM_FIELD(o, p_err) MEDSIM_FIELD(o, q_dt) return false;
      });
    } else if (name == "scenario") {
      auto& s = cfg.scenario;
      detail::apply_object(value, name, [&](const std::string& name, const json& value, const std::string& key) {
        MEDSIM_FIELD(s, area_extent) MEDSIM_FIELD(s, severity_alpha) MEDSIM_FIELD(s, severity_beta)
        MEDSIM_FIELD(s, high_severity_threshold) MEDSIM_FIELD(s, ttc_max) MEDSIM_FIELD(s, ttc_offset)
        MEDSIM_FIELD(s, access_min) MEDSIM_FIELD(s, access_max)
        if (name == "base") {
          const auto xy = read_value<std::vector<double>>(value, key);
          if (xy.size() != 2) throw ConfigError(key, "expected [x, y]");
          s.base = {xy[0], xy[1]};
          return true;
        }
        return false;
      });
    } else {
      throw ConfigError(name, "unknown key");
    }
  }
}

#undef MEDSIM_FIELD

inline void apply_overrides(SweepConfig& cfg, const ConfigOverrides& o) {
  if (o.master_seed) cfg.master_seed = *o.master_seed;
  if (o.trials) cfg.trials_per_condition = *o.trials;
  if (o.degradation_levels) cfg.degradation_levels = *o.degradation_levels;
  if (o.patient_loads) cfg.patient_loads = *o.patient_loads;
  if (o.policies) cfg.policies = detail::parse_policies(*o.policies, "policies");
  if (o.tau_c) cfg.metrics.tau_c = *o.tau_c;
  if (o.alpha) cfg.metrics.alpha = *o.alpha;
  if (o.beta) cfg.metrics.beta = *o.beta;
  if (o.w_s) cfg.weights.w_s = *o.w_s;
  if (o.w_u) cfg.weights.w_u = *o.w_u;
  if (o.w_a) cfg.weights.w_a = *o.w_a;
  if (o.delta0) cfg.weights.delta0 = *o.delta0;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
}

/// Defaults, then the config document (if any), then flags; the result is validated.
inline SweepConfig parse_config(const ConfigOverrides& flags, const std::optional<json>& file = std::nullopt) {
  SweepConfig cfg;
  if (file) apply_json(cfg, *file);
  apply_overrides(cfg, flags);
  validate(cfg);
  return cfg;
}

inline json to_json(const SweepConfig& c) {
  json policies = json::array();
  for (PolicyId p : c.policies) policies.push_back(std::string(to_string(p)));
  const auto& p = c.mission.platform;
  const auto& l = c.mission.localization;
  const auto& o = c.mission.operators;
  const auto& s = c.scenario;
  return {
      {"master_seed", c.master_seed},
      {"degradation_levels", c.degradation_levels},
      {"patient_loads", c.patient_loads},
      {"policies", policies},
      {"trials_per_condition", c.trials_per_condition},
      {"metrics", {{"tau_c", c.metrics.tau_c}, {"alpha", c.metrics.alpha}, {"beta", c.metrics.beta}}},
      {"weights",
       {{"w_s", c.weights.w_s}, {"w_u", c.weights.w_u}, {"w_a", c.weights.w_a}, {"delta0", c.weights.delta0}}},
      {"platform",
       {{"cruise_speed", p.cruise_speed},
        {"service_time", p.service_time},
        {"teleop_speed_factor", p.teleop_speed_factor},
        {"uncertainty_threshold", p.uncertainty_threshold},
        {"abort_grace", p.abort_grace},
        {"comm_timeout", p.comm_timeout},
        {"gamma_u", p.gamma_u},
        {"distance_ref", p.distance_ref},
        {"horizon", p.horizon},
        {"tick", p.tick}}},
      {"localization",
       {{"gps_sigma0", l.gps_sigma0},
        {"gps_kappa", l.gps_kappa},
        {"auto_sigma", l.auto_sigma},
        {"auto_drift", l.auto_drift},
        {"outage_rate_coeff", l.outage_rate_coeff},
        {"outage_mean_duration", l.outage_mean_duration}}},
      {"operators", {{"p_err", o.p_err}, {"q_dt", o.q_dt}}},
      {"scenario",
       {{"area_extent", s.area_extent},
        {"base", {s.base.x, s.base.y}},
        {"severity_alpha", s.severity_alpha},
        {"severity_beta", s.severity_beta},
        {"high_severity_threshold", s.high_severity_threshold},
        {"ttc_max", s.ttc_max},
        {"ttc_offset", s.ttc_offset},
        {"access_min", s.access_min},
        {"access_max", s.access_max}}},
  };
}

}  // namespace medsim
