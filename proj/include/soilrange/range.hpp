// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "soilrange/depth.hpp"
#include "soilrange/image.hpp"

namespace soilrange {

enum class Aggregation { Median, Mean };

struct GroundDistanceEstimate {
  std::optional<double> distance_mm;  // present iff valid
  std::size_t soil_pixel_count = 0;
  double soil_fraction = 0.0;
  double timestamp_ms = 0.0;
  bool extrapolated = false;  // carried forward by smooth_stream

  bool valid() const { return distance_mm.has_value(); }

  friend bool operator==(const GroundDistanceEstimate&, const GroundDistanceEstimate&) = default;
};

inline constexpr double kDefaultMinSoilFraction = 0.05;

/// Median (or mean) of the valid z inside roi. The estimate is valid only when
/// valid_count / roi_area >= min_soil_fraction and at least one pixel survives.
/// Throws Error{RoiOutOfBounds} or Error{InvalidValue} for a bad fraction.
GroundDistanceEstimate estimate_distance(const VerticalDepthMap& z_map, const Roi& roi,
                                         double min_soil_fraction = kDefaultMinSoilFraction,
                                         Aggregation aggregation = Aggregation::Median);

/// Moving median over the last `window` valid estimates. An invalid input
/// repeats the current median flagged extrapolated (or stays invalid before
/// the first valid frame). Throws Error{UnorderedTimestamps}.
std::vector<GroundDistanceEstimate> smooth_stream(std::span<const GroundDistanceEstimate> estimates,
                                                  std::size_t window);

/// Incremental form of smooth_stream for a single ordered consumer.
class StreamSmoother {
 public:
  explicit StreamSmoother(std::size_t window);

  GroundDistanceEstimate push(const GroundDistanceEstimate& estimate);

 private:
  std::size_t window_;
  std::vector<double> history_;  // last `window_` valid distances, oldest first
  std::optional<double> last_timestamp_;
};

struct ErrorStatistics {
  double mean_mm = 0.0;
  double sample_std_mm = 0.0;
  double ci95_low_mm = 0.0;
  double ci95_high_mm = 0.0;
  std::size_t n = 0;
};

/// Mean, sample standard deviation (n - 1) and the two-sided 95% Student-t
/// confidence interval of the mean. Throws Error{InsufficientData} for n < 2.
ErrorStatistics error_statistics(std::span<const double> errors_mm);

}  // namespace soilrange
