// SPDX-License-Identifier: Apache-2.0
//
// RGB -> depth-grid alignment.
//
// The per-pixel map is u = x*w11 + y*w12 + w13 + w14/z (same for v with row
// two). The coefficients come from identifying the backproject -> [R|T] ->
// project chain with that form; it is exact for rigs whose rotation is about
// the optical axis and whose translation has no z component, and a rig is
// accepted only while the residual stays within kAlignmentBudgetPx.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "soilrange/calib.hpp"
#include "soilrange/depth.hpp"
#include "soilrange/image.hpp"

namespace soilrange {

struct RgbFrame {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;
  double timestamp_ms = 0.0;

  RgbFrame() = default;
  RgbFrame(int w, int h, double timestamp = 0.0)
      : width(w), height(h), pixels(pixel_count(w, h)), timestamp_ms(timestamp) {}

  const Rgb& at(int col, int row) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
};

struct AlignedRgbFrame {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;
  std::vector<std::uint8_t> source_valid;

  AlignedRgbFrame() = default;
  AlignedRgbFrame(int w, int h)
      : width(w), height(h), pixels(pixel_count(w, h)), source_valid(pixel_count(w, h), 0) {}
};

struct AlignmentMap {
  // row 0: w11 w12 w13 w14, row 1: w21 w22 w23 w24
  std::array<std::array<double, 4>, 2> w{{{1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 0.0, 0.0}}};
  int depth_width = 0;
  int depth_height = 0;
  int rgb_width = 0;
  int rgb_height = 0;
};

inline constexpr double kAlignmentBudgetPx = 0.5;

/// Depth range over which a rig's residual against the reprojection chain is
/// checked before the map is accepted.
struct AlignmentCheckRange {
  double z_min_mm = 300.0;
  double z_max_mm = 10000.0;
};

/// Throws Error{DegenerateCalibration} when the rig cannot be expressed in the
/// affine-plus-inverse-depth form within kAlignmentBudgetPx.
AlignmentMap build_alignment_map(const RigCalibration& rig, AlignmentCheckRange check = {});

/// Largest |apply_alignment - oracle_reproject| (px, either axis) over the
/// check grid. Used by build_alignment_map and exposed for diagnostics.
double alignment_residual_px(const AlignmentMap& map, const RigCalibration& rig,
                             AlignmentCheckRange check = {});

/// Throws Error{NonPositiveDepth} when z <= 0.
PixelCoord apply_alignment(const AlignmentMap& map, double x, double y, double z_mm);

/// Nearest-neighbour RGB sample for every valid depth pixel. Row-parallel.
AlignedRgbFrame warp_rgb_to_depth(const RgbFrame& rgb, const VerticalDepthMap& z_map,
                                  const AlignmentMap& map);

/// Full 3D chain without the coefficient map: backproject in the depth camera,
/// rigid transform, project in the RGB camera.
/// Throws Error{NonPositiveDepth} or Error{PointBehindCamera}.
PixelCoord oracle_reproject(const RigCalibration& rig, double x, double y, double z_mm);

/// Eight labelled coefficients, one per line.
void dump_alignment_map(std::ostream& out, const AlignmentMap& map);

/// Array index nearest to a continuous 1-based coordinate, or -1 when it
/// falls outside [0, extent).
inline int nearest_index(double coord, int extent) {
  const double shifted = coord - 0.5;  // coordinate c covers [c - 0.5, c + 0.5)
  if (!(shifted >= 0.0) || shifted >= static_cast<double>(extent)) return -1;
  return static_cast<int>(shifted);
}

}  // namespace soilrange
