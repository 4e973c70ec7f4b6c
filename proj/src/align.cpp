// SPDX-License-Identifier: Apache-2.0

#include "soilrange/align.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pixel_ops.hpp"
#include "soilrange/error.hpp"

namespace soilrange {

namespace {

// Residual check grid over the depth frame and depth range.
constexpr int kGridCols = 17;
constexpr int kGridRows = 13;
constexpr int kGridDepths = 12;

double lerp(double lo, double hi, int i, int n) {
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

AlignmentMap build_alignment_map(const RigCalibration& rig, AlignmentCheckRange check) {
  rig.validate();
  if (!(check.z_min_mm > 0.0) || !(check.z_max_mm >= check.z_min_mm)) {
    throw Error(ErrorCode::InvalidValue, "alignment check range must satisfy 0 < z_min <= z_max");
  }
  const CameraIntrinsics& d = rig.depth_intrinsics;
  const CameraIntrinsics& c = rig.rgb_intrinsics;
  const Eigen::Matrix3d& r = rig.rotation;
  const Eigen::Vector3d& t = rig.translation_mm;

  // The rgb-frame depth of a backprojected point is z * (r31 a + r32 b + r33) + tz;
  // the affine form keeps only r33 * z.
  const double r33 = r(2, 2);
  if (!(r33 > 1e-6)) {
    throw Error(ErrorCode::DegenerateCalibration,
                "rgb optical axis is not aligned with the depth optical axis", "extrinsics.rotation");
  }

  AlignmentMap map;
  map.depth_width = d.width;
  map.depth_height = d.height;
  map.rgb_width = c.width;
  map.rgb_height = c.height;
  const double principal[2] = {c.cx, c.cy};
  for (int row = 0; row < 2; ++row) {
    const double scale = c.focal_px / r33;
    map.w[row][0] = scale * r(row, 0) / d.focal_px;
    map.w[row][1] = scale * r(row, 1) / d.focal_px;
    map.w[row][2] =
        scale * (r(row, 2) - r(row, 0) * d.cx / d.focal_px - r(row, 1) * d.cy / d.focal_px) +
        principal[row];
    map.w[row][3] = scale * t[row];
  }
  for (const auto& row : map.w) {
    for (double w : row) {
      if (!std::isfinite(w)) {
        throw Error(ErrorCode::DegenerateCalibration, "non-finite alignment coefficient");
      }
    }
  }

  const double residual = alignment_residual_px(map, rig, check);
  if (!(residual <= kAlignmentBudgetPx)) {
    std::ostringstream msg;
    msg << "affine alignment deviates from the reprojection chain by " << residual
        << " px (budget " << kAlignmentBudgetPx << " px)";
    throw Error(ErrorCode::DegenerateCalibration, msg.str(), "extrinsics");
  }
  return map;
}

double alignment_residual_px(const AlignmentMap& map, const RigCalibration& rig,
                             AlignmentCheckRange check) {
  const CameraIntrinsics& d = rig.depth_intrinsics;
  const double log_lo = std::log(check.z_min_mm);
  const double log_hi = std::log(check.z_max_mm);
  double worst = 0.0;
  for (int k = 0; k < kGridDepths; ++k) {
    const double z = std::exp(lerp(log_lo, log_hi, k, kGridDepths));
    for (int j = 0; j < kGridRows; ++j) {
      const double y = lerp(1.0, static_cast<double>(d.height), j, kGridRows);
      for (int i = 0; i < kGridCols; ++i) {
        const double x = lerp(1.0, static_cast<double>(d.width), i, kGridCols);
        PixelCoord truth;
        try {
          truth = oracle_reproject(rig, x, y, z);
        } catch (const Error& e) {
          if (e.code() == ErrorCode::PointBehindCamera) {
            throw Error(ErrorCode::DegenerateCalibration,
                        "part of the depth frustum lies behind the rgb camera", "extrinsics");
          }
          throw;
        }
        const PixelCoord mapped = detail::map_pixel(map, x, y, z);
        worst = std::max({worst, std::abs(mapped.u - truth.u), std::abs(mapped.v - truth.v)});
      }
    }
  }
  return worst;
}

PixelCoord apply_alignment(const AlignmentMap& map, double x, double y, double z_mm) {
  if (!(z_mm > 0.0)) throw Error(ErrorCode::NonPositiveDepth, "alignment depth must be > 0");
  return detail::map_pixel(map, x, y, z_mm);
}

AlignedRgbFrame warp_rgb_to_depth(const RgbFrame& rgb, const VerticalDepthMap& z_map,
                                  const AlignmentMap& map) {
  if (z_map.width != map.depth_width || z_map.height != map.depth_height) {
    throw Error(ErrorCode::DimensionMismatch, "depth map does not match the alignment map geometry");
  }
  if (rgb.width != map.rgb_width || rgb.height != map.rgb_height) {
    throw Error(ErrorCode::DimensionMismatch, "rgb frame does not match the alignment map geometry");
  }
  AlignedRgbFrame out(z_map.width, z_map.height);
  const int width = z_map.width;

#pragma omp parallel for schedule(static)
  for (int row = 0; row < z_map.height; ++row) {
    const std::size_t base = static_cast<std::size_t>(row) * width;
    const double y = static_cast<double>(row) + 1.0;
    for (int col = 0; col < width; ++col) {
      const std::size_t i = base + col;
      if (!z_map.valid[i]) continue;
      const PixelCoord p = detail::map_pixel(map, static_cast<double>(col) + 1.0, y, z_map.z_mm[i]);
      const int ci = nearest_index(p.u, rgb.width);
      const int ri = nearest_index(p.v, rgb.height);
      if (ci < 0 || ri < 0) continue;
      out.pixels[i] = rgb.at(ci, ri);
      out.source_valid[i] = 1;
    }
  }
  return out;
}

PixelCoord oracle_reproject(const RigCalibration& rig, double x, double y, double z_mm) {
  const Eigen::Vector3d in_depth = backproject({x, y}, z_mm, rig.depth_intrinsics);
  const Eigen::Vector3d in_rgb = rig.rotation * in_depth + rig.translation_mm;
  if (!(in_rgb.z() > 0.0)) {
    throw Error(ErrorCode::PointBehindCamera, "point lies behind the rgb camera");
  }
  return project(in_rgb, rig.rgb_intrinsics);
}

void dump_alignment_map(std::ostream& out, const AlignmentMap& map) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 4; ++c) {
      out << 'w' << (r + 1) << (c + 1) << " = " << map.w[r][c] << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace soilrange
