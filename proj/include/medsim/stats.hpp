#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace medsim {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for a single sample.
inline double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Student-t interval for the mean: mean +- t_{n-1,(1+level)/2} s / sqrt(n).
inline Interval confidence_interval(std::span<const double> xs, double level = 0.95) {
  if (xs.size() < 2) throw std::invalid_argument("confidence_interval: need at least two samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence_interval: level in (0, 1)");
  const double n = static_cast<double>(xs.size());
  const double m = mean(xs);
  const double s = sample_sd(xs);
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(dist, 0.5 + 0.5 * level);
  const double half = t * s / std::sqrt(n);
  return {m - half, m + half};
}

/// Quantile of already-sorted data: linear interpolation at the 1-indexed
/// rank h = (n - 1) q + 1.
inline double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
  const double pos = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline std::vector<double> quantiles(std::span<const double> samples, std::span<const double> qs) {
  if (samples.empty()) throw std::invalid_argument("quantiles: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(qs.size());
  for (double q : qs) out.push_back(sorted_quantile(sorted, q));
  return out;
}

struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

inline FiveNumber boxplot_stats(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("boxplot_stats: empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return {sorted.front(), sorted_quantile(sorted, 0.25), sorted_quantile(sorted, 0.5),
          sorted_quantile(sorted, 0.75), sorted.back()};
}

/// Indices of points not strictly dominated in (x, y), both minimised.
/// Output keeps input order. Sort-and-sweep, O(n log n).
template <class Point, class GetX, class GetY>
std::vector<std::size_t> pareto_indices(std::span<const Point> pts, GetX get_x, GetY get_y) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double xa = get_x(pts[a]), xb = get_x(pts[b]);
    if (xa != xb) return xa < xb;
    return get_y(pts[a]) < get_y(pts[b]);
  });
  std::vector<bool> keep(pts.size(), false);
  // Minimum y over all points with strictly smaller x.
  double best_y_before = INFINITY;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    const double x = get_x(pts[idx[i]]);
    while (j < idx.size() && get_x(pts[idx[j]]) == x) ++j;
    // Within an equal-x group only the minimal y survives (ties all survive).
    const double group_min = get_y(pts[idx[i]]);
    for (std::size_t k = i; k < j; ++k) {
      const double y = get_y(pts[idx[k]]);
      if (y == group_min && y < best_y_before) keep[idx[k]] = true;
    }
    best_y_before = std::min(best_y_before, group_min);
    i = j;
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (keep[k]) out.push_back(k);
  return out;
}

}  // namespace medsim
