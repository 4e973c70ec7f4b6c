// SPDX-License-Identifier: Apache-2.0

#include "soilrange/depth.hpp"

#include <algorithm>
#include <cmath>

#include "pixel_ops.hpp"
#include "soilrange/error.hpp"

namespace soilrange {

namespace {

void check_dims(int width, int height, const CameraIntrinsics& intr) {
  if (width != intr.width || height != intr.height) {
    throw Error(ErrorCode::DimensionMismatch,
                "frame is " + std::to_string(width) + "x" + std::to_string(height) +
                    ", intrinsics expect " + std::to_string(intr.width) + "x" +
                    std::to_string(intr.height));
  }
}

}  // namespace

double angular_factor(int col, int row, const CameraIntrinsics& intr) {
  return std::sqrt(detail::ray_norm_sq(col, row, intr));
}

VerticalDepthMap decode_vertical(const DepthFrame& frame, const CameraIntrinsics& intr,
                                 const TofConstants& tof) {
  check_dims(frame.width, frame.height, intr);
  VerticalDepthMap out(frame.width, frame.height, frame.timestamp_ms);
  const int width = frame.width;

#pragma omp parallel for schedule(static)
  for (int row = 0; row < frame.height; ++row) {
    const std::size_t base = static_cast<std::size_t>(row) * width;
    for (int col = 0; col < width; ++col) {
      const std::size_t i = base + col;
      const std::uint16_t g = frame.gray[i];
      if (g == 0) continue;
      const double z = detail::decode_pixel(g, detail::ray_norm_sq(col, row, intr), tof);
      if (detail::in_working_range(z, tof)) {
        out.z_mm[i] = z;
        out.valid[i] = 1;
      }
    }
  }
  return out;
}

DepthFrame encode_gray(const VerticalDepthMap& z_map, const CameraIntrinsics& intr,
                       const TofConstants& tof) {
  check_dims(z_map.width, z_map.height, intr);
  DepthFrame out(z_map.width, z_map.height, z_map.timestamp_ms);
  const int width = z_map.width;
  int overflow_row = -1;

#pragma omp parallel for schedule(static)
  for (int row = 0; row < z_map.height; ++row) {
    const std::size_t base = static_cast<std::size_t>(row) * width;
    for (int col = 0; col < width; ++col) {
      const std::size_t i = base + col;
      if (!z_map.valid[i]) continue;
      const double g = detail::encode_pixel(z_map.z_mm[i], detail::ray_norm_sq(col, row, intr), tof);
      if (!(g <= 65535.0)) {
#pragma omp atomic write
        overflow_row = row;
        continue;
      }
      out.gray[i] = static_cast<std::uint16_t>(std::max(g, 1.0));
    }
  }
  if (overflow_row >= 0) {
    throw Error(ErrorCode::RangeExceeded,
                "vertical distance needs more than 65535 gray counts (row " +
                    std::to_string(overflow_row) + ")");
  }
  return out;
}

std::optional<double> median_inplace(std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

DepthSummary depth_stats(const VerticalDepthMap& z_map, const Roi& roi) {
  if (!roi.fits(z_map.width, z_map.height)) {
    throw Error(ErrorCode::RoiOutOfBounds, "roi does not fit inside the depth map");
  }
  std::vector<double> values;
  values.reserve(roi.area());
  for (int row = roi.y; row < roi.y + roi.height; ++row) {
    for (int col = roi.x; col < roi.x + roi.width; ++col) {
      const std::size_t i = z_map.index(col, row);
      if (z_map.valid[i]) values.push_back(z_map.z_mm[i]);
    }
  }
  DepthSummary summary;
  if (values.empty()) return summary;
  summary.count = values.size();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  summary.min_mm = *lo;
  summary.max_mm = *hi;
  summary.median_mm = *median_inplace(values);
  return summary;
}

}  // namespace soilrange
