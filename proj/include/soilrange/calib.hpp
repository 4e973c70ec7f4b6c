// SPDX-License-Identifier: Apache-2.0
//
// Camera parameters for the depth + RGB rig and the pinhole primitives.
//
// Continuous pixel coordinates are 1-based pixel centres: the centre of array
// element (col, row) sits at (col + 1, row + 1). cx/cy use the same
// convention, so the depth decoder and the alignment share one frame.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace soilrange {

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

struct CameraIntrinsics {
  double focal_px = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws Error{InvalidValue | OutOfRangePrincipalPoint} naming `section`.
  void validate(const std::string& section = "camera") const;
};

struct TofConstants {
  double gray_scale_mm = 0.0;  // mm per gray count
  double z_offset_mm = 0.0;
  double range_min_mm = 0.0;
  double range_max_mm = 0.0;

  void validate(const std::string& section = "tof") const;
};

struct RigCalibration {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // depth -> rgb
  Eigen::Vector3d translation_mm = Eigen::Vector3d::Zero();
  CameraIntrinsics depth_intrinsics;
  CameraIntrinsics rgb_intrinsics;

  void validate() const;
};

struct CalibrationProfile {
  RigCalibration rig;
  TofConstants tof;
};

inline constexpr double kOrthonormalTolerance = 1e-9;

/// Published Blaze-101 depth camera parameters.
CameraIntrinsics blaze101_intrinsics();
TofConstants blaze101_tof();
/// Default 1280x1024 colour camera model used with the shipped profile.
CameraIntrinsics aca1300_intrinsics();
/// Blaze-101 + colour camera side by side, 30 mm apart along x. Same values
/// as profiles/blaze101.profile.
CalibrationProfile blaze101_profile();

/// Parses an INI-style profile with [depth_camera], [rgb_camera], [tof] and
/// [extrinsics] sections. Lengths in mm, pixel quantities in pixels.
/// Throws Error naming the first offending field; never returns a partially
/// validated profile.
CalibrationProfile load_calibration(std::istream& in);
CalibrationProfile load_calibration(const std::filesystem::path& path);

/// Writes a profile in the same format load_calibration reads.
void write_calibration(std::ostream& out, const CalibrationProfile& profile);

/// Pinhole projection. Throws Error{NonPositiveDepth} when z <= 0.
PixelCoord project(const Eigen::Vector3d& point_mm, const CameraIntrinsics& intr);

/// Inverse of project at depth z. Throws Error{NonPositiveDepth} when z <= 0.
Eigen::Vector3d backproject(PixelCoord pixel, double z_mm, const CameraIntrinsics& intr);

}  // namespace soilrange
