// SPDX-License-Identifier: Apache-2.0
//
// Per-pixel arithmetic shared by the parallel and reference kernels so both
// evaluate identical floating-point expressions.

#pragma once

#include <cmath>
#include <cstdint>

#include "soilrange/align.hpp"
#include "soilrange/calib.hpp"

namespace soilrange::detail {

/// a^2 + b^2 + 1 for array element (col, row), 1-based coordinates.
inline double ray_norm_sq(int col, int row, const CameraIntrinsics& intr) {
  const double a = (static_cast<double>(col) + 1.0 - intr.cx) / intr.focal_px;
  const double b = (static_cast<double>(row) + 1.0 - intr.cy) / intr.focal_px;
  return a * a + b * b + 1.0;
}

inline double decode_pixel(std::uint16_t g, double norm_sq, const TofConstants& tof) {
  return static_cast<double>(g) * tof.gray_scale_mm * std::sqrt(1.0 / norm_sq) - tof.z_offset_mm;
}

inline bool in_working_range(double z, const TofConstants& tof) {
  return z >= tof.range_min_mm && z <= tof.range_max_mm;
}

/// Nearest gray count for vertical distance z (not clamped to 16 bits). A z
/// inside the working range is nudged by one count when rounding alone would
/// decode it just outside the range.
inline double encode_pixel(double z, double norm_sq, const TofConstants& tof) {
  double g = std::round((z + tof.z_offset_mm) * std::sqrt(norm_sq) / tof.gray_scale_mm);
  if (in_working_range(z, tof)) {
    const auto decoded = [&](double count) {
      return count * tof.gray_scale_mm * std::sqrt(1.0 / norm_sq) - tof.z_offset_mm;
    };
    if (decoded(g) < tof.range_min_mm) g += 1.0;
    else if (decoded(g) > tof.range_max_mm) g -= 1.0;
  }
  return g;
}

inline PixelCoord map_pixel(const AlignmentMap& map, double x, double y, double z) {
  const auto& w = map.w;
  return {x * w[0][0] + y * w[0][1] + w[0][2] + w[0][3] / z,
          x * w[1][0] + y * w[1][1] + w[1][2] + w[1][3] / z};
}

}  // namespace soilrange::detail
