// SPDX-License-Identifier: Apache-2.0
//
// Netpbm image files, point-cloud and CSV exports.
//
// Depth frames are 16-bit PGM (P5, maxval 65535, big-endian samples), colour
// frames 8-bit PPM (P6), masks 8-bit PGM with 0 = residue and 255 = soil.
// Frame timestamps travel in a "# timestamp_ms <value>" header comment.

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>

#include "soilrange/align.hpp"
#include "soilrange/depth.hpp"
#include "soilrange/pipeline.hpp"
#include "soilrange/range.hpp"
#include "soilrange/segment.hpp"

namespace soilrange::io {

void write_depth_pgm(std::ostream& out, const DepthFrame& frame);
/// `has_timestamp` (optional) reports whether the header carried one.
DepthFrame read_depth_pgm(std::istream& in, bool* has_timestamp = nullptr);

void write_rgb_ppm(std::ostream& out, const RgbFrame& frame);
RgbFrame read_rgb_ppm(std::istream& in);

/// Pixels without a source sample are written black.
void write_aligned_ppm(std::ostream& out, const AlignedRgbFrame& frame);

void write_mask_pgm(std::ostream& out, const BinaryMask& mask);
/// Accepts 8-bit or 16-bit PGM; any nonzero sample is soil.
BinaryMask read_mask_pgm(std::istream& in);

/// 8-bit rendering of a depth map for viewing: near = bright, invalid = 0.
void write_depth_preview_pgm(std::ostream& out, const VerticalDepthMap& z_map);

/// "x y z" per valid pixel, mm, in the depth camera frame.
void write_point_cloud(std::ostream& out, const VerticalDepthMap& z_map,
                       const CameraIntrinsics& intr);

/// timestamp_ms,distance_mm,valid,soil_fraction[,extrapolated]
void write_estimates_csv(std::ostream& out, std::span<const GroundDistanceEstimate> estimates);
void write_metrics_csv(std::ostream& out, std::span<const FrameMetrics> metrics);

/// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

DepthFrame load_depth(const std::filesystem::path& path, bool* has_timestamp = nullptr);
RgbFrame load_rgb(const std::filesystem::path& path);
BinaryMask load_mask(const std::filesystem::path& path);

}  // namespace soilrange::io
