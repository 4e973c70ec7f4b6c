// SPDX-License-Identifier: Apache-2.0

#include "soilrange/calib.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "soilrange/error.hpp"
#include "text_util.hpp"

namespace soilrange {

namespace pt = boost::property_tree;

void CameraIntrinsics::validate(const std::string& section) const {
  if (!(focal_px > 0.0) || !std::isfinite(focal_px)) {
    throw Error(ErrorCode::InvalidValue, "focal length must be positive", section + ".focal_px");
  }
  if (width <= 0) throw Error(ErrorCode::InvalidValue, "width must be positive", section + ".width");
  if (height <= 0) {
    throw Error(ErrorCode::InvalidValue, "height must be positive", section + ".height");
  }
  if (!(cx > 0.0 && cx < width)) {
    throw Error(ErrorCode::OutOfRangePrincipalPoint, "cx must lie inside (0, width)", section + ".cx");
  }
  if (!(cy > 0.0 && cy < height)) {
    throw Error(ErrorCode::OutOfRangePrincipalPoint, "cy must lie inside (0, height)", section + ".cy");
  }
}

void TofConstants::validate(const std::string& section) const {
  if (!(gray_scale_mm > 0.0) || !std::isfinite(gray_scale_mm)) {
    throw Error(ErrorCode::InvalidValue, "gray scale must be positive", section + ".gray_scale_mm");
  }
  if (!std::isfinite(z_offset_mm)) {
    throw Error(ErrorCode::InvalidValue, "z offset must be finite", section + ".z_offset_mm");
  }
  if (!(range_min_mm < range_max_mm) || !std::isfinite(range_min_mm) ||
      !std::isfinite(range_max_mm)) {
    throw Error(ErrorCode::InvalidValue, "range_min_mm must be below range_max_mm",
                section + ".range_min_mm");
  }
}

void RigCalibration::validate() const {
  depth_intrinsics.validate("depth_camera");
  rgb_intrinsics.validate("rgb_camera");
  if (!rotation.allFinite()) {
    throw Error(ErrorCode::NonOrthonormalRotation, "rotation has non-finite entries",
                "extrinsics.rotation");
  }
  const double ortho_err =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  const double det_err = std::abs(rotation.determinant() - 1.0);
  if (ortho_err >= kOrthonormalTolerance || det_err > kOrthonormalTolerance) {
    std::ostringstream msg;
    msg << "rotation is not a proper orthonormal matrix (|R^T R - I|max = " << ortho_err
        << ", |det - 1| = " << det_err << ")";
    throw Error(ErrorCode::NonOrthonormalRotation, msg.str(), "extrinsics.rotation");
  }
  if (!translation_mm.allFinite()) {
    throw Error(ErrorCode::InvalidValue, "translation has non-finite entries",
                "extrinsics.translation_mm");
  }
}

CameraIntrinsics blaze101_intrinsics() { return {509.935, 313.05, 239.60, 640, 480}; }

TofConstants blaze101_tof() { return {0.0229, 23.97, 300.0, 10000.0}; }

CameraIntrinsics aca1300_intrinsics() { return {900.0, 640.5, 512.5, 1280, 1024}; }

CalibrationProfile blaze101_profile() {
  CalibrationProfile profile;
  profile.rig.depth_intrinsics = blaze101_intrinsics();
  profile.rig.rgb_intrinsics = aca1300_intrinsics();
  profile.rig.translation_mm = Eigen::Vector3d(30.0, 0.0, 0.0);
  profile.tof = blaze101_tof();
  return profile;
}

namespace {

std::string require(const pt::ptree& tree, const std::string& key) {
  auto value = tree.get_optional<std::string>(pt::ptree::path_type(key, '/'));
  if (!value || detail::trim(*value).empty()) {
    throw Error(ErrorCode::MissingField, "required field not present", detail::dotted(key));
  }
  return std::string(detail::trim(*value));
}

double require_number(const pt::ptree& tree, const std::string& key) {
  return detail::parse_double(require(tree, key), detail::dotted(key));
}

int require_int(const pt::ptree& tree, const std::string& key) {
  return detail::parse_int(require(tree, key), detail::dotted(key));
}

CameraIntrinsics read_intrinsics(const pt::ptree& tree, const std::string& section) {
  CameraIntrinsics intr;
  intr.focal_px = require_number(tree, section + "/focal_px");
  intr.cx = require_number(tree, section + "/cx");
  intr.cy = require_number(tree, section + "/cy");
  intr.width = require_int(tree, section + "/width");
  intr.height = require_int(tree, section + "/height");
  return intr;
}

}  // namespace

CalibrationProfile load_calibration(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidValue, std::string("malformed profile: ") + e.message(),
                "line " + std::to_string(e.line()));
  }

  CalibrationProfile profile;
  RigCalibration& rig = profile.rig;
  rig.depth_intrinsics = read_intrinsics(tree, "depth_camera");
  rig.rgb_intrinsics = read_intrinsics(tree, "rgb_camera");

  TofConstants& tof = profile.tof;
  tof.gray_scale_mm = require_number(tree, "tof/gray_scale_mm");
  tof.z_offset_mm = require_number(tree, "tof/z_offset_mm");
  tof.range_min_mm = require_number(tree, "tof/range_min_mm");
  tof.range_max_mm = require_number(tree, "tof/range_max_mm");

  const auto rot = detail::parse_list(require(tree, "extrinsics/rotation"), "extrinsics.rotation");
  if (rot.size() != 9) {
    throw Error(ErrorCode::InvalidValue, "rotation needs 9 row-major values", "extrinsics.rotation");
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rig.rotation(r, c) = rot[static_cast<std::size_t>(3 * r + c)];
  }
  const auto trans =
      detail::parse_list(require(tree, "extrinsics/translation_mm"), "extrinsics.translation_mm");
  if (trans.size() != 3) {
    throw Error(ErrorCode::InvalidValue, "translation needs 3 values", "extrinsics.translation_mm");
  }
  rig.translation_mm = Eigen::Vector3d(trans[0], trans[1], trans[2]);

  rig.validate();
  tof.validate();
  return profile;
}

CalibrationProfile load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open calibration profile", path.string());
  return load_calibration(in);
}

void write_calibration(std::ostream& out, const CalibrationProfile& profile) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  auto write_intr = [&](const char* section, const CameraIntrinsics& intr) {
    out << '[' << section << "]\n"
        << "focal_px = " << intr.focal_px << '\n'
        << "cx = " << intr.cx << '\n'
        << "cy = " << intr.cy << '\n'
        << "width = " << intr.width << '\n'
        << "height = " << intr.height << "\n\n";
  };
  write_intr("depth_camera", profile.rig.depth_intrinsics);
  write_intr("rgb_camera", profile.rig.rgb_intrinsics);
  out << "[tof]\n"
      << "gray_scale_mm = " << profile.tof.gray_scale_mm << '\n'
      << "z_offset_mm = " << profile.tof.z_offset_mm << '\n'
      << "range_min_mm = " << profile.tof.range_min_mm << '\n'
      << "range_max_mm = " << profile.tof.range_max_mm << "\n\n";
  out << "[extrinsics]\nrotation =";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out << ' ' << profile.rig.rotation(r, c);
  }
  out << "\ntranslation_mm =";
  for (int i = 0; i < 3; ++i) out << ' ' << profile.rig.translation_mm[i];
  out << '\n';
  out.flags(old_flags);
  out.precision(old_precision);
}

PixelCoord project(const Eigen::Vector3d& point_mm, const CameraIntrinsics& intr) {
  if (!(point_mm.z() > 0.0)) {
    throw Error(ErrorCode::NonPositiveDepth, "cannot project a point with z <= 0");
  }
  return {intr.focal_px * point_mm.x() / point_mm.z() + intr.cx,
          intr.focal_px * point_mm.y() / point_mm.z() + intr.cy};
}

Eigen::Vector3d backproject(PixelCoord pixel, double z_mm, const CameraIntrinsics& intr) {
  if (!(z_mm > 0.0)) throw Error(ErrorCode::NonPositiveDepth, "backprojection depth must be > 0");
  return {(pixel.u - intr.cx) * z_mm / intr.focal_px, (pixel.v - intr.cy) * z_mm / intr.focal_px,
          z_mm};
}

}  // namespace soilrange
