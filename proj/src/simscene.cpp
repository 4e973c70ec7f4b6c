// SPDX-License-Identifier: Apache-2.0

#include "soilrange/simscene.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "soilrange/error.hpp"
#include "text_util.hpp"

namespace soilrange {

namespace {

// Counter-based randomness so every pixel's noise depends only on
// (seed, offset, pixel, stream) and rows can render in any order.
std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::uint64_t key) {
  return static_cast<double>(splitmix(key) >> 11) * 0x1.0p-53;
}

struct PixelKey {
  std::uint64_t frame;

  std::uint64_t at(std::size_t index, std::uint64_t stream) const {
    return splitmix(frame ^ splitmix(static_cast<std::uint64_t>(index) * 8 + stream));
  }
  double gaussian(std::size_t index) const {
    const double u1 = 1.0 - unit_uniform(at(index, 0));  // (0, 1]
    const double u2 = unit_uniform(at(index, 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  std::uint8_t jitter(std::uint8_t base, int amplitude, std::size_t index,
                      std::uint64_t channel) const {
    if (amplitude <= 0) return base;
    const auto span = static_cast<std::uint64_t>(2 * amplitude + 1);
    const int delta = static_cast<int>(at(index, 2 + channel) % span) - amplitude;
    return static_cast<std::uint8_t>(std::clamp(int{base} + delta, 0, 255));
  }
  Rgb color(const ColorSpec& spec, std::size_t index) const {
    return {jitter(spec.base.r, spec.jitter, index, 0), jitter(spec.base.g, spec.jitter, index, 1),
            jitter(spec.base.b, spec.jitter, index, 2)};
  }
};

PixelKey frame_key(std::uint64_t seed, double offset_mm, std::uint64_t salt) {
  return {splitmix(splitmix(seed) ^ std::bit_cast<std::uint64_t>(offset_mm) ^ salt)};
}

double wrap(double x, double length) {
  if (length <= 0.0) return x;
  double w = std::fmod(x, length);
  if (w < 0.0) w += length;
  return w;
}

struct PlacedStraw {
  double cx, cy, cos_a, sin_a, half_length, radius, base;

  /// Height of the straw top above soil at (x, y), or negative when outside.
  double height_at(double x, double y) const {
    const double dx = x - cx;
    const double dy = y - cy;
    const double along = dx * cos_a + dy * sin_a;
    if (std::abs(along) > half_length) return -1.0;
    const double perp = -dx * sin_a + dy * cos_a;
    if (std::abs(perp) > radius) return -1.0;
    return base + radius + std::sqrt(radius * radius - perp * perp);
  }
  double extent() const { return half_length + radius; }
};

PlacedStraw place(const Straw& s, double shift_x) {
  const double angle = s.angle_deg * std::numbers::pi / 180.0;
  return {s.center_x_mm + shift_x, s.center_y_mm, std::cos(angle), std::sin(angle),
          0.5 * s.length_mm, 0.5 * s.diameter_mm, s.layer_index * s.diameter_mm};
}

/// Uniform bucket grid over straw bounding boxes.
class StrawIndex {
 public:
  StrawIndex(const std::vector<Straw>& straws, double wrap_length) {
    for (const auto& s : straws) {
      if (wrap_length > 0.0) {
        for (double shift : {-wrap_length, 0.0, wrap_length}) placed_.push_back(place(s, shift));
      } else {
        placed_.push_back(place(s, 0.0));
      }
    }
    if (placed_.empty()) return;
    x0_ = y0_ = std::numeric_limits<double>::max();
    double x1 = std::numeric_limits<double>::lowest();
    double y1 = x1;
    for (const auto& p : placed_) {
      x0_ = std::min(x0_, p.cx - p.extent());
      y0_ = std::min(y0_, p.cy - p.extent());
      x1 = std::max(x1, p.cx + p.extent());
      y1 = std::max(y1, p.cy + p.extent());
    }
    nx_ = std::max(1, static_cast<int>(std::ceil((x1 - x0_) / kCell)));
    ny_ = std::max(1, static_cast<int>(std::ceil((y1 - y0_) / kCell)));
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t k = 0; k < placed_.size(); ++k) {
      const auto& p = placed_[k];
      const int i0 = cell_x(p.cx - p.extent()), i1 = cell_x(p.cx + p.extent());
      const int j0 = cell_y(p.cy - p.extent()), j1 = cell_y(p.cy + p.extent());
      // only cells whose centre lies within reach of the straw's axis segment
      const double reach = p.radius + kCell * std::numbers::sqrt2 / 2.0;
      for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
          const double dx = x0_ + (i + 0.5) * kCell - p.cx;
          const double dy = y0_ + (j + 0.5) * kCell - p.cy;
          const double along = std::clamp(dx * p.cos_a + dy * p.sin_a, -p.half_length, p.half_length);
          const double ex = dx - along * p.cos_a;
          const double ey = dy - along * p.sin_a;
          if (ex * ex + ey * ey <= reach * reach) {
            cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(k);
          }
        }
      }
    }
  }

  /// Tallest straw top above soil at (x, y); negative when uncovered.
  double height_at(double x, double y) const {
    if (cells_.empty()) return -1.0;
    const double fx = (x - x0_) / kCell;
    const double fy = (y - y0_) / kCell;
    if (fx < 0.0 || fy < 0.0 || fx >= nx_ || fy >= ny_) return -1.0;
    const auto& bucket = cells_[static_cast<std::size_t>(fy) * nx_ + static_cast<std::size_t>(fx)];
    double best = -1.0;
    for (std::size_t k : bucket) best = std::max(best, placed_[k].height_at(x, y));
    return best;
  }

 private:
  static constexpr double kCell = 8.0;
  int cell_x(double x) const { return std::clamp(static_cast<int>((x - x0_) / kCell), 0, nx_ - 1); }
  int cell_y(double y) const { return std::clamp(static_cast<int>((y - y0_) / kCell), 0, ny_ - 1); }

  std::vector<PlacedStraw> placed_;
  std::vector<std::vector<std::size_t>> cells_;
  double x0_ = 0.0, y0_ = 0.0;
  int nx_ = 0, ny_ = 0;
};

struct SurfaceSample {
  double soil_z;
  double top_z;
  bool covered;
};

/// The scene as seen along the depth-camera ray with normalized direction
/// (a, b): footprint (a * D, b * D) on the base plane, shifted by the offset.
class SceneModel {
 public:
  SceneModel(const SceneSpec& spec, double offset_mm)
      : spec_(spec),
        offset_(offset_mm),
        length_(spec.profile_length_mm()),
        straws_(spec.straws, length_) {}

  SurfaceSample sample(double a, double b) const {
    const double d = spec_.camera_distance_mm;
    const double track_x = wrap(a * d + offset_, length_);
    const double soil = d - spec_.soil_thickness_at(track_x);
    const double h = straws_.height_at(track_x, b * d);
    if (h < 0.0) return {soil, soil, false};
    return {soil, soil - h, true};
  }

 private:
  const SceneSpec& spec_;
  double offset_;
  double length_;
  StrawIndex straws_;
};

void check_spec_range(bool ok, const std::string& what, const std::string& field) {
  if (!ok) throw Error(ErrorCode::SpecOutOfRange, what, field);
}

}  // namespace

double SceneSpec::profile_length_mm() const {
  double total = 0.0;
  for (const auto& s : soil_profile) total += s.length_mm;
  return total;
}

double SceneSpec::soil_thickness_at(double track_x_mm) const {
  if (soil_profile.empty()) return 0.0;
  double x = wrap(track_x_mm, profile_length_mm());
  for (const auto& s : soil_profile) {
    if (x < s.length_mm) return s.thickness_mm;
    x -= s.length_mm;
  }
  return soil_profile.back().thickness_mm;
}

void SceneSpec::validate(const TofConstants& tof) const {
  check_spec_range(camera_distance_mm >= tof.range_min_mm && camera_distance_mm <= tof.range_max_mm,
                   "camera distance outside the TOF working range", "scene.camera_distance_mm");
  check_spec_range(noise_sigma_mm >= 0.0 && std::isfinite(noise_sigma_mm),
                   "noise sigma must be >= 0", "scene.noise_sigma_mm");
  for (std::size_t i = 0; i < soil_profile.size(); ++i) {
    const auto& s = soil_profile[i];
    const std::string field = "soil_profile.segments[" + std::to_string(i) + "]";
    check_spec_range(s.length_mm > 0.0, "segment length must be > 0", field);
    check_spec_range(s.thickness_mm >= 0.0 && s.thickness_mm < camera_distance_mm,
                     "segment thickness must lie in [0, camera distance)", field);
  }
  for (std::size_t i = 0; i < straws.size(); ++i) {
    const auto& s = straws[i];
    const std::string field = "straws[" + std::to_string(i) + "]";
    check_spec_range(s.diameter_mm > 0.0, "straw diameter must be > 0", field);
    check_spec_range(s.length_mm > 0.0, "straw length must be > 0", field);
    check_spec_range(s.layer_index >= 0, "straw layer must be >= 0", field);
  }
  for (const auto* c : {&soil_color, &straw_color}) {
    check_spec_range(c->jitter >= 0 && c->jitter <= 255, "colour jitter must lie in [0, 255]",
                     c == &soil_color ? "scene.soil_jitter" : "scene.straw_jitter");
  }
}

TrackRegion frame_footprint(const CameraIntrinsics& intr, double distance_mm) {
  const double s = distance_mm / intr.focal_px;
  return {(0.5 - intr.cx) * s, (intr.width + 0.5 - intr.cx) * s, (0.5 - intr.cy) * s,
          (intr.height + 0.5 - intr.cy) * s};
}

RenderedPair render_pair(const SceneSpec& spec, const SimCamera& camera, double platform_offset_mm,
                         double timestamp_ms) {
  spec.validate(camera.tof);
  camera.rig.validate();
  const CameraIntrinsics& di = camera.rig.depth_intrinsics;
  const CameraIntrinsics& ci = camera.rig.rgb_intrinsics;
  const SceneModel scene(spec, platform_offset_mm);
  const PixelKey key = frame_key(spec.seed, platform_offset_mm, 0);
  const PixelKey rgb_key = frame_key(spec.seed, platform_offset_mm, 0x5bd1e995ULL);

  RenderedPair out;
  GroundTruth& truth = out.truth;
  truth.width = di.width;
  truth.height = di.height;
  const std::size_t n = pixel_count(di.width, di.height);
  truth.residue_footprint.assign(n, 0);
  truth.soil_surface_mm.assign(n, 0.0);
  truth.top_surface_mm.assign(n, 0.0);

  VerticalDepthMap noisy(di.width, di.height, timestamp_ms);
  std::vector<Rgb> grid_color(n);

#pragma omp parallel for schedule(static)
  for (int row = 0; row < di.height; ++row) {
    const double b = (row + 1.0 - di.cy) / di.focal_px;
    for (int col = 0; col < di.width; ++col) {
      const double a = (col + 1.0 - di.cx) / di.focal_px;
      const std::size_t i = static_cast<std::size_t>(row) * di.width + col;
      const SurfaceSample s = scene.sample(a, b);
      truth.soil_surface_mm[i] = s.soil_z;
      truth.top_surface_mm[i] = s.top_z;
      truth.residue_footprint[i] = s.covered ? 1 : 0;
      const double z = s.top_z + spec.noise_sigma_mm * key.gaussian(i);
      noisy.z_mm[i] = z;
      noisy.valid[i] = (z >= camera.tof.range_min_mm && z <= camera.tof.range_max_mm) ? 1 : 0;
      grid_color[i] = key.color(s.covered ? spec.straw_color : spec.soil_color, i);
    }
  }
  std::size_t covered = 0;
  for (auto f : truth.residue_footprint) covered += f;
  truth.coverage_fraction = static_cast<double>(covered) / static_cast<double>(n);
  truth.true_distance_mm = scene.sample(0.0, 0.0).soil_z;

  out.depth = encode_gray(noisy, di, camera.tof);

  // RGB: every pixel first gets the scene colour where its ray meets the
  // surface (fixed-point ray march on the depth-frame heightfield), then the
  // depth pixels are splatted through the reprojection chain on top.
  RgbFrame& rgb = out.rgb;
  rgb = RgbFrame(ci.width, ci.height, timestamp_ms);
  const Eigen::Matrix3d rt = camera.rig.rotation.transpose();
  const Eigen::Vector3d origin = -(rt * camera.rig.translation_mm);  // rgb centre in depth frame

#pragma omp parallel for schedule(static)
  for (int row = 0; row < ci.height; ++row) {
    for (int col = 0; col < ci.width; ++col) {
      const Eigen::Vector3d dir =
          rt * Eigen::Vector3d((col + 1.0 - ci.cx) / ci.focal_px, (row + 1.0 - ci.cy) / ci.focal_px, 1.0);
      const std::size_t i = static_cast<std::size_t>(row) * ci.width + col;
      if (!(dir.z() > 1e-9)) {
        rgb.pixels[i] = rgb_key.color(spec.soil_color, i);
        continue;
      }
      double target_z = spec.camera_distance_mm;
      SurfaceSample s{};
      for (int iter = 0; iter < 4; ++iter) {
        const double t = (target_z - origin.z()) / dir.z();
        const Eigen::Vector3d p = origin + t * dir;
        s = scene.sample(p.x() / p.z(), p.y() / p.z());
        if (s.top_z == target_z) break;
        target_z = s.top_z;
      }
      rgb.pixels[i] = rgb_key.color(s.covered ? spec.straw_color : spec.soil_color, i);
    }
  }

  std::vector<double> zbuffer(rgb.pixels.size(), std::numeric_limits<double>::infinity());
  for (int row = 0; row < di.height; ++row) {
    for (int col = 0; col < di.width; ++col) {
      const std::size_t i = static_cast<std::size_t>(row) * di.width + col;
      const double z = truth.top_surface_mm[i];
      PixelCoord p;
      try {
        p = oracle_reproject(camera.rig, col + 1.0, row + 1.0, z);
      } catch (const Error&) {
        continue;
      }
      const int u = nearest_index(p.u, ci.width);
      const int v = nearest_index(p.v, ci.height);
      if (u < 0 || v < 0) continue;
      const std::size_t j = static_cast<std::size_t>(v) * ci.width + u;
      if (z < zbuffer[j]) {
        zbuffer[j] = z;
        rgb.pixels[j] = grid_color[i];
      }
    }
  }
  return out;
}

std::vector<RenderedPair> render_sequence(const SceneSpec& spec, const SimCamera& camera,
                                          double speed_mm_per_frame, int frames,
                                          double frame_period_ms) {
  if (frames < 1) throw Error(ErrorCode::SpecOutOfRange, "need at least one frame", "frames");
  const double length = spec.profile_length_mm();
  std::vector<RenderedPair> out;
  out.reserve(static_cast<std::size_t>(frames));
  for (int k = 0; k < frames; ++k) {
    const double offset = wrap(k * speed_mm_per_frame, length);
    out.push_back(render_pair(spec, camera, offset, k * frame_period_ms));
  }
  return out;
}

std::vector<Straw> generate_scatter(const ScatterParams& params, const TrackRegion& region,
                                    std::uint64_t seed, bool wrap_x) {
  if (!(params.coverage >= 0.0 && params.coverage < 1.0)) {
    throw Error(ErrorCode::SpecOutOfRange, "scatter coverage must lie in [0, 1)", "scatter.coverage");
  }
  if (!(params.diameter_min_mm > 0.0 && params.diameter_max_mm >= params.diameter_min_mm)) {
    throw Error(ErrorCode::SpecOutOfRange, "bad straw diameter range", "scatter.diameter_min_mm");
  }
  if (!(params.length_min_mm > 0.0 && params.length_max_mm >= params.length_min_mm)) {
    throw Error(ErrorCode::SpecOutOfRange, "bad straw length range", "scatter.length_min_mm");
  }
  if (params.max_layers < 1) {
    throw Error(ErrorCode::SpecOutOfRange, "max_layers must be >= 1", "scatter.max_layers");
  }
  const int nx = static_cast<int>(std::ceil(region.x_max - region.x_min));
  const int ny = static_cast<int>(std::ceil(region.y_max - region.y_min));
  if (nx <= 0 || ny <= 0) throw Error(ErrorCode::SpecOutOfRange, "empty scatter region", "scatter");

  std::vector<std::uint8_t> stack(static_cast<std::size_t>(nx) * ny, 0);
  const double total = static_cast<double>(stack.size());
  std::size_t covered = 0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(region.x_min, region.x_max);
  std::uniform_real_distribution<double> uy(region.y_min, region.y_max);
  std::uniform_real_distribution<double> uangle(0.0, 180.0);
  std::uniform_real_distribution<double> ulen(params.length_min_mm, params.length_max_mm);
  std::uniform_real_distribution<double> udia(params.diameter_min_mm, params.diameter_max_mm);

  std::vector<Straw> straws;
  std::vector<std::size_t> cells;
  while (static_cast<double>(covered) < params.coverage * total && straws.size() < params.max_straws) {
    Straw s;
    s.center_x_mm = ux(rng);
    s.center_y_mm = uy(rng);
    s.angle_deg = uangle(rng);
    s.length_mm = ulen(rng);
    s.diameter_mm = udia(rng);
    const PlacedStraw p = place(s, 0.0);

    cells.clear();
    const int i0 = static_cast<int>(std::floor(p.cx - p.extent() - region.x_min));
    const int i1 = static_cast<int>(std::ceil(p.cx + p.extent() - region.x_min));
    const int j0 = std::max(0, static_cast<int>(std::floor(p.cy - p.extent() - region.y_min)));
    const int j1 = std::min(ny - 1, static_cast<int>(std::ceil(p.cy + p.extent() - region.y_min)));
    int layer = 0;
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        int ii = i;
        if (wrap_x) {
          ii = ((i % nx) + nx) % nx;
        } else if (i < 0 || i >= nx) {
          continue;
        }
        const double x = region.x_min + i + 0.5;
        const double y = region.y_min + j + 0.5;
        if (p.height_at(x, y) < 0.0) continue;
        const std::size_t c = static_cast<std::size_t>(j) * nx + ii;
        cells.push_back(c);
        layer = std::max(layer, int{stack[c]});
      }
    }
    s.layer_index = std::min(layer, params.max_layers - 1);
    for (std::size_t c : cells) {
      if (stack[c] == 0) ++covered;
      if (stack[c] < 255) ++stack[c];
    }
    straws.push_back(s);
  }
  return straws;
}

namespace {

namespace pt = boost::property_tree;

std::optional<std::string> get(const pt::ptree& tree, const std::string& key) {
  auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '/'));
  if (!v) return std::nullopt;
  return std::string(detail::trim(*v));
}

Rgb parse_color(const std::string& text, const std::string& field) {
  const auto values = detail::parse_list(text, field);
  if (values.size() != 3) throw Error(ErrorCode::SpecOutOfRange, "colour needs 3 values", field);
  Rgb c;
  std::uint8_t* channels[3] = {&c.r, &c.g, &c.b};
  for (int k = 0; k < 3; ++k) {
    if (!(values[k] >= 0.0 && values[k] <= 255.0)) {
      throw Error(ErrorCode::SpecOutOfRange, "colour channel outside [0, 255]", field);
    }
    *channels[k] = static_cast<std::uint8_t>(std::lround(values[k]));
  }
  return c;
}

}  // namespace

SceneSpec load_scene(std::istream& in, const CameraIntrinsics& depth_intr,
                     std::optional<std::uint64_t> seed_override) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::SpecOutOfRange, std::string("malformed scene: ") + e.message(),
                "line " + std::to_string(e.line()));
  }
  SceneSpec spec;
  auto number = [&](const std::string& key, double fallback) {
    auto v = get(tree, key);
    return v ? detail::parse_double(*v, detail::dotted(key)) : fallback;
  };
  spec.camera_distance_mm = number("scene/camera_distance_mm", spec.camera_distance_mm);
  spec.noise_sigma_mm = number("scene/noise_sigma_mm", spec.noise_sigma_mm);
  if (auto v = get(tree, "scene/seed")) {
    spec.seed = static_cast<std::uint64_t>(detail::parse_double(*v, "scene.seed"));
  }
  if (seed_override) spec.seed = *seed_override;
  if (auto v = get(tree, "scene/soil_color")) spec.soil_color.base = parse_color(*v, "scene.soil_color");
  if (auto v = get(tree, "scene/straw_color")) spec.straw_color.base = parse_color(*v, "scene.straw_color");
  spec.soil_color.jitter = static_cast<int>(number("scene/soil_jitter", spec.soil_color.jitter));
  spec.straw_color.jitter = static_cast<int>(number("scene/straw_jitter", spec.straw_color.jitter));

  if (auto v = get(tree, "soil_profile/segments")) {
    for (auto token : detail::split(*v, ",")) {
      const auto parts = detail::split(token, ":");
      if (parts.size() != 2) {
        throw Error(ErrorCode::SpecOutOfRange, "segment must be length:thickness",
                    "soil_profile.segments");
      }
      spec.soil_profile.push_back({detail::parse_double(parts[0], "soil_profile.segments"),
                                   detail::parse_double(parts[1], "soil_profile.segments")});
    }
  }
  if (auto v = get(tree, "straws/list")) {
    for (auto token : detail::split(*v, ";")) {
      const auto f = detail::parse_list(token, "straws.list");
      if (f.size() != 6) {
        throw Error(ErrorCode::SpecOutOfRange,
                    "straw needs x y angle_deg length diameter layer", "straws.list");
      }
      spec.straws.push_back({f[0], f[1], f[2], f[3], f[4], static_cast<int>(f[5])});
    }
  }
  if (tree.get_child_optional("scatter")) {
    ScatterParams params;
    params.coverage = number("scatter/coverage", params.coverage);
    params.diameter_min_mm = number("scatter/diameter_min_mm", params.diameter_min_mm);
    params.diameter_max_mm = number("scatter/diameter_max_mm", params.diameter_min_mm);
    params.length_min_mm = number("scatter/length_min_mm", params.length_min_mm);
    params.length_max_mm = number("scatter/length_max_mm", params.length_max_mm);
    params.max_layers = static_cast<int>(number("scatter/max_layers", params.max_layers));
    const auto seed = seed_override ? *seed_override
                                    : static_cast<std::uint64_t>(
                                          number("scatter/seed", static_cast<double>(spec.seed)));
    TrackRegion region = frame_footprint(depth_intr, spec.camera_distance_mm);
    const bool wrap_x = !spec.soil_profile.empty();
    if (wrap_x) {
      region.x_min = 0.0;
      region.x_max = spec.profile_length_mm();
    }
    auto scattered = generate_scatter(params, region, seed, wrap_x);
    spec.straws.insert(spec.straws.end(), scattered.begin(), scattered.end());
  }
  return spec;
}

SceneSpec load_scene(const std::filesystem::path& path, const CameraIntrinsics& depth_intr,
                     std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scene file", path.string());
  return load_scene(in, depth_intr, seed_override);
}

void write_scene(std::ostream& out, const SceneSpec& spec) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  auto color = [&](const Rgb& c) { out << int{c.r} << ' ' << int{c.g} << ' ' << int{c.b}; };
  out << "[scene]\ncamera_distance_mm = " << spec.camera_distance_mm
      << "\nnoise_sigma_mm = " << spec.noise_sigma_mm << "\nseed = " << spec.seed
      << "\nsoil_color = ";
  color(spec.soil_color.base);
  out << "\nsoil_jitter = " << spec.soil_color.jitter << "\nstraw_color = ";
  color(spec.straw_color.base);
  out << "\nstraw_jitter = " << spec.straw_color.jitter << '\n';
  if (!spec.soil_profile.empty()) {
    out << "\n[soil_profile]\nsegments =";
    for (std::size_t i = 0; i < spec.soil_profile.size(); ++i) {
      out << (i ? ", " : " ") << spec.soil_profile[i].length_mm << ':'
          << spec.soil_profile[i].thickness_mm;
    }
    out << '\n';
  }
  if (!spec.straws.empty()) {
    out << "\n[straws]\nlist =";
    for (std::size_t i = 0; i < spec.straws.size(); ++i) {
      const auto& s = spec.straws[i];
      out << (i ? "; " : " ") << s.center_x_mm << ' ' << s.center_y_mm << ' ' << s.angle_deg << ' '
          << s.length_mm << ' ' << s.diameter_mm << ' ' << s.layer_index;
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace soilrange
