// SPDX-License-Identifier: Apache-2.0
//
// Soil / residue masking on the depth grid: colour threshold, binarize,
// dilate the residue region, and subtract it from the depth validity mask.

#pragma once

#include <cstdint>
#include <vector>

#include "soilrange/align.hpp"
#include "soilrange/depth.hpp"

namespace soilrange {

enum class ClassifierMode { Threshold, ExternalMask };

struct ColorClassifierConfig {
  double brightness_threshold = 120.0;     // (R+G+B)/3, 0..255
  double excess_yellow_threshold = 40.0;   // R + G - 2B, -510..510
  ClassifierMode mode = ClassifierMode::Threshold;

  void validate() const;
};

/// 1 = soil, 0 = residue or no data.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h, std::uint8_t fill = 1)
      : width(w), height(h), bits(pixel_count(w, h), fill) {}

  std::uint8_t at(int col, int row) const {
    return bits[static_cast<std::size_t>(row) * width + col];
  }
  std::size_t soil_count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Residue rule for one colour sample.
inline bool is_residue(const Rgb& px, const ColorClassifierConfig& cfg) {
  const int sum = int{px.r} + int{px.g} + int{px.b};
  const int excess_yellow = int{px.r} + int{px.g} - 2 * int{px.b};
  return sum >= 3.0 * cfg.brightness_threshold && excess_yellow >= cfg.excess_yellow_threshold;
}

/// Threshold mode only; ExternalMask callers load their mask instead.
BinaryMask classify_residue(const AlignedRgbFrame& frame, const ColorClassifierConfig& cfg);

/// Grows the residue (0) region by a (2r+1)x(2r+1) square. Pixels beyond the
/// border count as soil. Separable min-filter, row/column parallel.
BinaryMask dilate(const BinaryMask& mask, int radius);

/// valid_out = valid_in AND mask; z untouched.
/// Throws Error{DimensionMismatch}.
VerticalDepthMap apply_mask(const VerticalDepthMap& z_map, const BinaryMask& mask);

/// Fraction of soil bits.
double soil_coverage(const BinaryMask& mask);

}  // namespace soilrange
