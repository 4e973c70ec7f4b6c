// SPDX-License-Identifier: Apache-2.0

#include "soilrange/segment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "soilrange/error.hpp"

namespace soilrange {

void ColorClassifierConfig::validate() const {
  if (!(brightness_threshold >= 0.0 && brightness_threshold <= 255.0)) {
    throw Error(ErrorCode::ConfigInvalid, "brightness threshold must lie in [0, 255]",
                "segment.brightness_threshold");
  }
  if (!(excess_yellow_threshold >= -510.0 && excess_yellow_threshold <= 510.0)) {
    throw Error(ErrorCode::ConfigInvalid, "excess-yellow threshold must lie in [-510, 510]",
                "segment.excess_yellow_threshold");
  }
}

std::size_t BinaryMask::soil_count() const {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](auto b) { return b != 0; }));
}

double soil_coverage(const BinaryMask& mask) {
  if (mask.bits.empty()) return 0.0;
  return static_cast<double>(mask.soil_count()) / static_cast<double>(mask.bits.size());
}

BinaryMask classify_residue(const AlignedRgbFrame& frame, const ColorClassifierConfig& cfg) {
  BinaryMask out(frame.width, frame.height, 0);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.bits.size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out.bits[i] = (frame.source_valid[i] && !is_residue(frame.pixels[i], cfg)) ? 1 : 0;
  }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidValue, "dilation radius must be >= 0");
  if (radius == 0) return mask;
  const int width = mask.width;
  const int height = mask.height;

  // Horizontal pass: residue within `radius` columns. Uses a running count of
  // residue pixels inside the sliding window.
  BinaryMask horizontal(width, height, 1);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < height; ++row) {
    const std::uint8_t* src = mask.bits.data() + static_cast<std::size_t>(row) * width;
    std::uint8_t* dst = horizontal.bits.data() + static_cast<std::size_t>(row) * width;
    int residue = 0;
    for (int c = 0; c < std::min(radius, width); ++c) residue += src[c] == 0;
    for (int col = 0; col < width; ++col) {
      const int enter = col + radius;
      const int leave = col - radius - 1;
      if (enter < width) residue += src[enter] == 0;
      if (leave >= 0) residue -= src[leave] == 0;
      dst[col] = residue > 0 ? 0 : 1;
    }
  }

  // Vertical pass over strips of columns, same running-count scheme.
  constexpr int kStrip = 64;
  const int strips = (width + kStrip - 1) / kStrip;
  BinaryMask out(width, height, 1);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < strips; ++s) {
    const int c0 = s * kStrip;
    const int c1 = std::min(width, c0 + kStrip);
    std::array<int, kStrip> residue{};
    auto accumulate = [&](int row, int sign) {
      const std::uint8_t* src = horizontal.bits.data() + static_cast<std::size_t>(row) * width;
      for (int col = c0; col < c1; ++col) residue[col - c0] += sign * (src[col] == 0);
    };
    for (int r = 0; r < std::min(radius, height); ++r) accumulate(r, 1);
    for (int row = 0; row < height; ++row) {
      if (row + radius < height) accumulate(row + radius, 1);
      if (row - radius - 1 >= 0) accumulate(row - radius - 1, -1);
      std::uint8_t* dst = out.bits.data() + static_cast<std::size_t>(row) * width;
      for (int col = c0; col < c1; ++col) dst[col] = residue[col - c0] > 0 ? 0 : 1;
    }
  }
  return out;
}

VerticalDepthMap apply_mask(const VerticalDepthMap& z_map, const BinaryMask& mask) {
  if (z_map.width != mask.width || z_map.height != mask.height) {
    throw Error(ErrorCode::DimensionMismatch, "mask and depth map sizes differ");
  }
  VerticalDepthMap out = z_map;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.valid.size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out.valid[i] = (z_map.valid[i] && mask.bits[i]) ? 1 : 0;
  }
  return out;
}

}  // namespace soilrange
