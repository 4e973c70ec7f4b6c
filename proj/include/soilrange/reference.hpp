// SPDX-License-Identifier: Apache-2.0
//
// Single-threaded reference versions of the per-pixel kernels. The parallel
// kernels must match these bit for bit; tests and the kernel benchmark are the
// only callers.

#pragma once

#include "soilrange/align.hpp"
#include "soilrange/depth.hpp"
#include "soilrange/segment.hpp"

namespace soilrange::reference {

VerticalDepthMap decode_vertical(const DepthFrame& frame, const CameraIntrinsics& intr,
                                 const TofConstants& tof);
DepthFrame encode_gray(const VerticalDepthMap& z_map, const CameraIntrinsics& intr,
                       const TofConstants& tof);
AlignedRgbFrame warp_rgb_to_depth(const RgbFrame& rgb, const VerticalDepthMap& z_map,
                                  const AlignmentMap& map);
BinaryMask classify_residue(const AlignedRgbFrame& frame, const ColorClassifierConfig& cfg);
/// Direct (2r+1)^2 neighbourhood scan.
BinaryMask dilate(const BinaryMask& mask, int radius);
VerticalDepthMap apply_mask(const VerticalDepthMap& z_map, const BinaryMask& mask);

}  // namespace soilrange::reference
