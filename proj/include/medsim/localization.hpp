#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "medsim/random.hpp"
#include "medsim/scenario.hpp"

namespace medsim {

/// Symmetric 2x2 covariance, m^2.
struct Covariance2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static Covariance2 isotropic(double variance) { return {variance, 0.0, variance}; }

  double trace() const { return xx + yy; }
  double determinant() const { return xx * yy - xy * xy; }
  /// Mean per-axis variance.
  double axis_variance() const { return 0.5 * trace(); }

  double min_eigenvalue() const {
    const double half_tr = 0.5 * trace();
    const double disc = std::sqrt(std::max(0.0, half_tr * half_tr - determinant()));
    return half_tr - disc;
  }

  Covariance2 inverse() const {
    const double det = determinant();
    return {yy / det, -xy / det, xx / det};
  }

  friend Covariance2 operator+(const Covariance2& a, const Covariance2& b) {
    return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
  }
  friend bool operator==(const Covariance2&, const Covariance2&) = default;
};

inline Point operator*(const Covariance2& m, Point p) {
  return {m.xx * p.x + m.xy * p.y, m.xy * p.x + m.yy * p.y};
}

enum class PoseSource { gps, autonomous, dt_fused };

struct PoseEstimate {
  Point position;
  Covariance2 covariance;
  PoseSource source = PoseSource::gps;
  bool valid = true;  // false during an outage; position is meaningless then

  friend bool operator==(const PoseEstimate&, const PoseEstimate&) = default;
};

struct LocalizationParams {
  double gps_sigma0 = 3.0;             // m, nominal GPS per-axis sd
  double gps_kappa = 50.0;             // variance inflation at delta = 1
  double auto_sigma = 8.0;             // m, self-contained estimator sd at its anchor
  double auto_drift = 4.0;             // m^2/min per-axis variance growth since anchor
  double outage_rate_coeff = 0.06;     // outage onsets per minute at delta = 1
  double outage_mean_duration = 1.0;   // min

  double gps_variance(double delta) const {
    return gps_sigma0 * gps_sigma0 * (1.0 + gps_kappa * delta);
  }
  double auto_variance() const { return auto_sigma * auto_sigma; }

  friend bool operator==(const LocalizationParams&, const LocalizationParams&) = default;
};

struct OutageInterval {
  double start = 0.0;  // inclusive
  double end = 0.0;    // exclusive

  double length() const { return end - start; }
  bool contains(double t) const { return t >= start && t < end; }
  friend bool operator==(const OutageInterval&, const OutageInterval&) = default;
};

/// GNSS/link outage pattern for one mission.
struct DegradationProfile {
  double delta = 0.0;
  double horizon = 0.0;
  std::vector<OutageInterval> outages;  // disjoint, ordered, inside [0, horizon]

  /// The outage covering `t`, if any.
  std::optional<OutageInterval> outage_at(double t) const {
    auto it = std::upper_bound(outages.begin(), outages.end(), t,
                               [](double v, const OutageInterval& o) { return v < o.start; });
    if (it == outages.begin()) return std::nullopt;
    --it;
    if (it->contains(t)) return *it;
    return std::nullopt;
  }

  bool in_outage(double t) const { return outage_at(t).has_value(); }

  double total_outage() const {
    double sum = 0.0;
    for (const auto& o : outages) sum += o.length();
    return sum;
  }

  friend bool operator==(const DegradationProfile&, const DegradationProfile&) = default;
};

/// Alternating renewal process: link-up periods are exponential with rate
/// outage_rate_coeff * delta, outages exponential with the configured mean.
/// delta = 0 never draws and returns no outages.
inline DegradationProfile outage_schedule(double delta, double horizon, Rng& rng,
                                          const LocalizationParams& params = {}) {
  if (!(horizon > 0.0)) throw std::invalid_argument("outage_schedule: horizon must be positive");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("outage_schedule: delta must lie in [0, 1]");
  DegradationProfile profile{delta, horizon, {}};
  const double rate = params.outage_rate_coeff * delta;
  if (rate <= 0.0) return profile;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(1.0 / rate);
    if (t >= horizon) break;
    const double end = std::min(horizon, t + rng.exponential(params.outage_mean_duration));
    if (end > t) profile.outages.push_back({t, end});
    t = end;
  }
  return profile;
}

inline Point noisy(Point truth, double variance, Rng& rng) {
  const double sd = std::sqrt(variance);
  return {truth.x + rng.normal(0.0, sd), truth.y + rng.normal(0.0, sd)};
}

/// GPS fix at `time`: invalid inside an outage, otherwise isotropic noise with
/// per-axis variance sigma0^2 (1 + kappa delta).
inline PoseEstimate gps_estimate(Point truth, const DegradationProfile& profile, double time, Rng& rng,
                                 const LocalizationParams& params = {}) {
  const double var = params.gps_variance(profile.delta);
  PoseEstimate est;
  est.source = PoseSource::gps;
  est.covariance = Covariance2::isotropic(var);
  if (profile.in_outage(time)) {
    est.valid = false;
    return est;
  }
  est.position = noisy(truth, var, rng);
  return est;
}

/// Self-contained (GPS-independent) estimate. Per-axis variance is
/// anchor_variance + auto_drift * minutes_since_anchor; delta does not enter.
inline PoseEstimate auto_estimate(Point truth, double minutes_since_anchor, Rng& rng,
                                  const LocalizationParams& params, double anchor_variance) {
  const double var = anchor_variance + params.auto_drift * std::max(0.0, minutes_since_anchor);
  return {noisy(truth, var, rng), Covariance2::isotropic(var), PoseSource::autonomous, true};
}

inline PoseEstimate auto_estimate(Point truth, double minutes_since_anchor, Rng& rng,
                                  const LocalizationParams& params = {}) {
  return auto_estimate(truth, minutes_since_anchor, rng, params, params.auto_variance());
}

struct LocalizationLoss : std::runtime_error {
  LocalizationLoss() : std::runtime_error("dt_fused_estimate: no valid pose source") {}
};

/// Inverse-variance (information form) fusion of two estimates.
/// Throws LocalizationLoss when neither input is valid.
inline PoseEstimate dt_fused_estimate(const PoseEstimate& gps, const PoseEstimate& aut) {
  if (!gps.valid && !aut.valid) throw LocalizationLoss();
  PoseEstimate out;
  if (!gps.valid || !aut.valid) {
    out = gps.valid ? gps : aut;
  } else if (gps.covariance.determinant() <= 0.0 || aut.covariance.determinant() <= 0.0) {
    // A degenerate (exact) input already carries all the information.
    out = gps.covariance.trace() <= aut.covariance.trace() ? gps : aut;
  } else {
    const Covariance2 info_g = gps.covariance.inverse();
    const Covariance2 info_a = aut.covariance.inverse();
    out.covariance = (info_g + info_a).inverse();
    const Point wg = info_g * gps.position;
    const Point wa = info_a * aut.position;
    out.position = out.covariance * Point{wg.x + wa.x, wg.y + wa.y};
  }
  out.source = PoseSource::dt_fused;
  out.valid = true;
  return out;
}

}  // namespace medsim
