// SPDX-License-Identifier: Apache-2.0

#include "soilrange/range.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "soilrange/error.hpp"

namespace soilrange {

GroundDistanceEstimate estimate_distance(const VerticalDepthMap& z_map, const Roi& roi,
                                         double min_soil_fraction, Aggregation aggregation) {
  if (!roi.fits(z_map.width, z_map.height)) {
    throw Error(ErrorCode::RoiOutOfBounds, "roi does not fit inside the depth map");
  }
  if (!(min_soil_fraction >= 0.0 && min_soil_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidValue, "min_soil_fraction must lie in [0, 1]",
                "range.min_soil_fraction");
  }
  std::vector<double> values;
  values.reserve(roi.area());
  for (int row = roi.y; row < roi.y + roi.height; ++row) {
    const std::size_t base = z_map.index(0, row);
    for (int col = roi.x; col < roi.x + roi.width; ++col) {
      if (z_map.valid[base + col]) values.push_back(z_map.z_mm[base + col]);
    }
  }

  GroundDistanceEstimate est;
  est.timestamp_ms = z_map.timestamp_ms;
  est.soil_pixel_count = values.size();
  est.soil_fraction = static_cast<double>(values.size()) / static_cast<double>(roi.area());
  if (values.empty() || est.soil_fraction < min_soil_fraction) return est;

  if (aggregation == Aggregation::Median) {
    est.distance_mm = median_inplace(values);
  } else {
    est.distance_mm = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(values.size());
  }
  return est;
}

StreamSmoother::StreamSmoother(std::size_t window) : window_(window) {
  if (window_ == 0) throw Error(ErrorCode::InvalidValue, "smoothing window must be >= 1");
  history_.reserve(window_);
}

GroundDistanceEstimate StreamSmoother::push(const GroundDistanceEstimate& estimate) {
  if (last_timestamp_ && estimate.timestamp_ms < *last_timestamp_) {
    throw Error(ErrorCode::UnorderedTimestamps, "estimate timestamps must be non-decreasing");
  }
  last_timestamp_ = estimate.timestamp_ms;

  GroundDistanceEstimate out = estimate;
  if (estimate.valid()) {
    if (history_.size() == window_) history_.erase(history_.begin());
    history_.push_back(*estimate.distance_mm);
    out.extrapolated = false;
  } else if (history_.empty()) {
    return out;
  } else {
    out.extrapolated = true;
  }
  std::vector<double> scratch = history_;
  out.distance_mm = median_inplace(scratch);
  return out;
}

std::vector<GroundDistanceEstimate> smooth_stream(std::span<const GroundDistanceEstimate> estimates,
                                                  std::size_t window) {
  StreamSmoother smoother(window);
  std::vector<GroundDistanceEstimate> out;
  out.reserve(estimates.size());
  for (const auto& e : estimates) out.push_back(smoother.push(e));
  return out;
}

ErrorStatistics error_statistics(std::span<const double> errors_mm) {
  const std::size_t n = errors_mm.size();
  if (n < 2) {
    throw Error(ErrorCode::InsufficientData, "need at least two errors for a sample deviation");
  }
  // Sum in sorted order so permutations of the input give identical results.
  std::vector<double> sorted(errors_mm.begin(), errors_mm.end());
  std::sort(sorted.begin(), sorted.end());

  const double count = static_cast<double>(n);
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / count;
  double ss = 0.0;
  for (double e : sorted) ss += (e - mean) * (e - mean);
  const double std_dev = std::sqrt(ss / (count - 1.0));

  const boost::math::students_t dist(count - 1.0);
  const double t_crit = boost::math::quantile(boost::math::complement(dist, 0.025));
  const double half_width = t_crit * std_dev / std::sqrt(count);

  ErrorStatistics stats;
  stats.n = n;
  stats.mean_mm = mean;
  stats.sample_std_mm = std_dev;
  stats.ci95_low_mm = mean - half_width;
  stats.ci95_high_mm = mean + half_width;
  return stats;
}

}  // namespace soilrange
