// SPDX-License-Identifier: Apache-2.0
//
// TOF radial gray images <-> per-pixel vertical distance.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "soilrange/calib.hpp"
#include "soilrange/image.hpp"

namespace soilrange {

/// Raw 16-bit TOF frame. Each gray count encodes radial distance; g = 0 is
/// the "no return" sentinel.
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> gray;
  double timestamp_ms = 0.0;

  DepthFrame() = default;
  DepthFrame(int w, int h, double timestamp = 0.0)
      : width(w), height(h), gray(pixel_count(w, h), 0), timestamp_ms(timestamp) {}

  std::uint16_t at(int col, int row) const {
    return gray[static_cast<std::size_t>(row) * width + col];
  }
};

/// Vertical (optical-axis) distance per pixel. z_mm is only meaningful where
/// valid[i] != 0.
struct VerticalDepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> z_mm;
  std::vector<std::uint8_t> valid;
  double timestamp_ms = 0.0;

  VerticalDepthMap() = default;
  VerticalDepthMap(int w, int h, double timestamp = 0.0)
      : width(w),
        height(h),
        z_mm(pixel_count(w, h), 0.0),
        valid(pixel_count(w, h), 0),
        timestamp_ms(timestamp) {}

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * width + col;
  }
};

/// sqrt(((u - cx)/f)^2 + ((v - cy)/f)^2 + 1) at array element (col, row).
double angular_factor(int col, int row, const CameraIntrinsics& intr);

/// z = g * mu / angular_factor - z_offset. Pixels with g = 0 or z outside the
/// TOF working range come back invalid. Row-parallel; bit-identical to
/// reference::decode_vertical.
VerticalDepthMap decode_vertical(const DepthFrame& frame, const CameraIntrinsics& intr,
                                 const TofConstants& tof);

/// Exact inverse of decode_vertical up to one gray quantum. Invalid pixels
/// encode as g = 0; valid ones are clamped to g >= 1.
/// Throws Error{RangeExceeded} when a valid z needs more than 65535 counts.
DepthFrame encode_gray(const VerticalDepthMap& z_map, const CameraIntrinsics& intr,
                       const TofConstants& tof);

struct DepthSummary {
  std::size_t count = 0;
  double min_mm = 0.0;
  double max_mm = 0.0;
  double median_mm = 0.0;

  bool empty() const { return count == 0; }
};

DepthSummary depth_stats(const VerticalDepthMap& z_map, const Roi& roi);

/// Median of a scratch buffer (mean of the two central values for even sizes).
/// Reorders `values`. Returns nullopt for an empty buffer.
std::optional<double> median_inplace(std::vector<double>& values);

}  // namespace soilrange
