// SPDX-License-Identifier: Apache-2.0

#include "soilrange/reference.hpp"

#include <algorithm>

#include "pixel_ops.hpp"
#include "soilrange/error.hpp"

namespace soilrange::reference {

VerticalDepthMap decode_vertical(const DepthFrame& frame, const CameraIntrinsics& intr,
                                 const TofConstants& tof) {
  if (frame.width != intr.width || frame.height != intr.height) {
    throw Error(ErrorCode::DimensionMismatch, "frame size differs from intrinsics");
  }
  VerticalDepthMap out(frame.width, frame.height, frame.timestamp_ms);
  for (int row = 0; row < frame.height; ++row) {
    for (int col = 0; col < frame.width; ++col) {
      const std::size_t i = out.index(col, row);
      if (frame.gray[i] == 0) continue;
      const double z = detail::decode_pixel(frame.gray[i], detail::ray_norm_sq(col, row, intr), tof);
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
  if (z_map.width != intr.width || z_map.height != intr.height) {
    throw Error(ErrorCode::DimensionMismatch, "depth map size differs from intrinsics");
  }
  DepthFrame out(z_map.width, z_map.height, z_map.timestamp_ms);
  for (int row = 0; row < z_map.height; ++row) {
    for (int col = 0; col < z_map.width; ++col) {
      const std::size_t i = z_map.index(col, row);
      if (!z_map.valid[i]) continue;
      const double g = detail::encode_pixel(z_map.z_mm[i], detail::ray_norm_sq(col, row, intr), tof);
      if (!(g <= 65535.0)) {
        throw Error(ErrorCode::RangeExceeded, "vertical distance needs more than 65535 gray counts");
      }
      out.gray[i] = static_cast<std::uint16_t>(std::max(g, 1.0));
    }
  }
  return out;
}

AlignedRgbFrame warp_rgb_to_depth(const RgbFrame& rgb, const VerticalDepthMap& z_map,
                                  const AlignmentMap& map) {
  if (z_map.width != map.depth_width || z_map.height != map.depth_height ||
      rgb.width != map.rgb_width || rgb.height != map.rgb_height) {
    throw Error(ErrorCode::DimensionMismatch, "frames do not match the alignment map geometry");
  }
  AlignedRgbFrame out(z_map.width, z_map.height);
  for (int row = 0; row < z_map.height; ++row) {
    for (int col = 0; col < z_map.width; ++col) {
      const std::size_t i = z_map.index(col, row);
      if (!z_map.valid[i]) continue;
      const PixelCoord p = detail::map_pixel(map, col + 1.0, row + 1.0, z_map.z_mm[i]);
      const int ci = nearest_index(p.u, rgb.width);
      const int ri = nearest_index(p.v, rgb.height);
      if (ci < 0 || ri < 0) continue;
      out.pixels[i] = rgb.at(ci, ri);
      out.source_valid[i] = 1;
    }
  }
  return out;
}

BinaryMask classify_residue(const AlignedRgbFrame& frame, const ColorClassifierConfig& cfg) {
  BinaryMask out(frame.width, frame.height, 0);
  for (std::size_t i = 0; i < out.bits.size(); ++i) {
    if (frame.source_valid[i] && !is_residue(frame.pixels[i], cfg)) out.bits[i] = 1;
  }
  return out;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius < 0) throw Error(ErrorCode::InvalidValue, "dilation radius must be >= 0");
  BinaryMask out(mask.width, mask.height, 1);
  for (int row = 0; row < mask.height; ++row) {
    for (int col = 0; col < mask.width; ++col) {
      bool residue_near = false;
      for (int dr = -radius; dr <= radius && !residue_near; ++dr) {
        const int r = row + dr;
        if (r < 0 || r >= mask.height) continue;
        for (int dc = -radius; dc <= radius; ++dc) {
          const int c = col + dc;
          if (c < 0 || c >= mask.width) continue;
          if (mask.at(c, r) == 0) {
            residue_near = true;
            break;
          }
        }
      }
      out.bits[static_cast<std::size_t>(row) * mask.width + col] = residue_near ? 0 : 1;
    }
  }
  return out;
}

VerticalDepthMap apply_mask(const VerticalDepthMap& z_map, const BinaryMask& mask) {
  if (z_map.width != mask.width || z_map.height != mask.height) {
    throw Error(ErrorCode::DimensionMismatch, "mask and depth map sizes differ");
  }
  VerticalDepthMap out = z_map;
  for (std::size_t i = 0; i < out.valid.size(); ++i) {
    out.valid[i] = (z_map.valid[i] && mask.bits[i]) ? 1 : 0;
  }
  return out;
}

}  // namespace soilrange::reference
