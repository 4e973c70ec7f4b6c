// SPDX-License-Identifier: Apache-2.0
//
// Synthetic depth + RGB pairs with exact ground truth.
//
// World frame = depth camera frame. Each depth pixel owns the footprint
// (a * D, b * D) on the base plane at D = camera_distance_mm, where (a, b) is
// the pixel's normalized ray. The platform moves along +x: a footprint at x
// reads the soil profile and straws at track position x + offset, wrapped at
// the profile length when a profile exists.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <filesystem>
#include <optional>
#include <vector>

#include "soilrange/align.hpp"
#include "soilrange/calib.hpp"
#include "soilrange/depth.hpp"

namespace soilrange {

struct SoilSegment {
  double length_mm = 0.0;
  double thickness_mm = 0.0;
};

/// A straw lying flat. Its cross-section is a circle of `diameter_mm` whose
/// bottom sits layer_index * diameter_mm above the soil.
struct Straw {
  double center_x_mm = 0.0;  // track coordinates
  double center_y_mm = 0.0;
  double angle_deg = 0.0;    // direction of the straw axis from +x
  double length_mm = 100.0;
  double diameter_mm = 5.0;
  int layer_index = 0;
};

struct ColorSpec {
  Rgb base;
  int jitter = 0;  // uniform per channel in [-jitter, jitter]
};

struct SceneSpec {
  double camera_distance_mm = 518.0;  // camera to base plane
  std::vector<SoilSegment> soil_profile;  // empty = flat base plane
  std::vector<Straw> straws;
  ColorSpec soil_color{{60, 45, 30}, 10};
  ColorSpec straw_color{{210, 190, 110}, 10};
  double noise_sigma_mm = 2.0;
  std::uint64_t seed = 1;

  double profile_length_mm() const;
  /// Soil thickness at a track position (wrapped). 0 without a profile.
  double soil_thickness_at(double track_x_mm) const;
  /// Throws Error{SpecOutOfRange}.
  void validate(const TofConstants& tof) const;
};

struct GroundTruth {
  double true_distance_mm = 0.0;          // soil surface on the optical axis
  std::vector<std::uint8_t> residue_footprint;  // depth grid, 1 = straw on top
  double coverage_fraction = 0.0;
  std::vector<double> soil_surface_mm;    // straw-free, noise-free z per pixel
  std::vector<double> top_surface_mm;     // noise-free z including straws
  int width = 0;
  int height = 0;
};

struct RenderedPair {
  DepthFrame depth;
  RgbFrame rgb;
  GroundTruth truth;
};

/// Rendering needs the rig geometry and the TOF encoding.
struct SimCamera {
  RigCalibration rig;
  TofConstants tof;
};

/// Depth is the noisy top surface encoded through encode_gray; RGB is coloured
/// on the depth grid and then forward-mapped to the native RGB geometry with
/// oracle_reproject (nearest surface wins), holes filled through the inverse
/// mapping at the base plane. Throws Error{SpecOutOfRange}.
RenderedPair render_pair(const SceneSpec& spec, const SimCamera& camera, double platform_offset_mm,
                         double timestamp_ms = 0.0);

/// Frame k is rendered at offset k * speed (wrapped) with timestamp k * period.
std::vector<RenderedPair> render_sequence(const SceneSpec& spec, const SimCamera& camera,
                                          double speed_mm_per_frame, int frames,
                                          double frame_period_ms = 50.0);

/// Rectangle in track coordinates (mm).
struct TrackRegion {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

/// Footprint of the whole depth frame on the base plane at `distance_mm`.
TrackRegion frame_footprint(const CameraIntrinsics& intr, double distance_mm);

struct ScatterParams {
  double coverage = 0.3;  // target covered area fraction of the region
  double diameter_min_mm = 5.0;
  double diameter_max_mm = 5.0;
  double length_min_mm = 60.0;
  double length_max_mm = 160.0;
  int max_layers = 4;
  std::size_t max_straws = 20000;
};

/// Random straws dropped into `region` until the covered fraction (1 mm grid)
/// reaches params.coverage. A straw lands one layer above the tallest stack
/// it overlaps, capped at max_layers - 1. Deterministic in `seed`.
std::vector<Straw> generate_scatter(const ScatterParams& params, const TrackRegion& region,
                                    std::uint64_t seed, bool wrap_x = false);

/// INI-style scene document: [scene], [soil_profile], [straws], [scatter].
/// Scatter straws are generated at load time (region = frame footprint, or
/// the whole track when a profile exists).
/// `seed_override` replaces both the scene seed and the scatter seed.
SceneSpec load_scene(std::istream& in, const CameraIntrinsics& depth_intr,
                     std::optional<std::uint64_t> seed_override = std::nullopt);
SceneSpec load_scene(const std::filesystem::path& path, const CameraIntrinsics& depth_intr,
                     std::optional<std::uint64_t> seed_override = std::nullopt);
void write_scene(std::ostream& out, const SceneSpec& spec);

}  // namespace soilrange
