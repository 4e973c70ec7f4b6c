// SPDX-License-Identifier: Apache-2.0

#include "soilrange/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "soilrange/error.hpp"
#include "soilrange/io.hpp"
#include "text_util.hpp"

namespace soilrange {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration<double, std::micro>(to - from).count();
}

// Converts parse failures into ConfigInvalid, keeping the key name.
template <class F>
auto config_value(std::string_view key, F&& parse) {
  try {
    return parse(std::string(key));
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInvalid, e.message(), std::string(key));
  }
}

}  // namespace

const std::vector<std::pair<std::string_view, std::string_view>>& config_keys() {
  static const std::vector<std::pair<std::string_view, std::string_view>> keys = {
      {"segment.enabled", "true|false; false skips residue masking"},
      {"segment.mode", "threshold|external-mask"},
      {"segment.brightness_threshold", "residue needs (R+G+B)/3 >= this (0..255, default 120)"},
      {"segment.excess_yellow_threshold", "residue needs R+G-2B >= this (default 40)"},
      {"segment.dilation_radius", "square dilation half-width in pixels (default 2)"},
      {"segment.mask_path", "mask image for external-mask mode (0 = residue, 255 = soil)"},
      {"range.roi", "full | x,y,width,height in depth pixels"},
      {"range.min_soil_fraction", "minimum soil fraction of the roi for a valid frame (default 0.05)"},
      {"range.aggregation", "median|mean"},
      {"range.smooth_window", "moving-median window over valid frames (default 1 = off)"},
  };
  return keys;
}

void set_config_value(PipelineConfig& config, std::string_view key, std::string_view raw) {
  const std::string_view value = detail::trim(raw);
  auto& seg = config.segment;
  auto& rng = config.range;
  if (key == "segment.enabled") {
    seg.enabled = config_value(key, [&](const std::string& k) { return detail::parse_bool(value, k); });
  } else if (key == "segment.mode") {
    if (value == "threshold") {
      seg.classifier.mode = ClassifierMode::Threshold;
    } else if (value == "external-mask") {
      seg.classifier.mode = ClassifierMode::ExternalMask;
    } else {
      throw Error(ErrorCode::ConfigInvalid, "expected threshold or external-mask", std::string(key));
    }
  } else if (key == "segment.brightness_threshold") {
    seg.classifier.brightness_threshold =
        config_value(key, [&](const std::string& k) { return detail::parse_double(value, k); });
  } else if (key == "segment.excess_yellow_threshold") {
    seg.classifier.excess_yellow_threshold =
        config_value(key, [&](const std::string& k) { return detail::parse_double(value, k); });
  } else if (key == "segment.dilation_radius") {
    seg.dilation_radius =
        config_value(key, [&](const std::string& k) { return detail::parse_int(value, k); });
  } else if (key == "segment.mask_path") {
    seg.external_mask_path = std::string(value);
  } else if (key == "range.roi") {
    if (value == "full") {
      rng.roi.reset();
    } else {
      const auto v = config_value(key, [&](const std::string& k) { return detail::parse_list(value, k); });
      if (v.size() != 4 || std::any_of(v.begin(), v.end(), [](double d) { return d != std::floor(d); })) {
        throw Error(ErrorCode::ConfigInvalid, "roi must be four integers x,y,width,height",
                    std::string(key));
      }
      rng.roi = Roi{static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
                    static_cast<int>(v[3])};
    }
  } else if (key == "range.min_soil_fraction") {
    rng.min_soil_fraction =
        config_value(key, [&](const std::string& k) { return detail::parse_double(value, k); });
  } else if (key == "range.aggregation") {
    if (value == "median") {
      rng.aggregation = Aggregation::Median;
    } else if (value == "mean") {
      rng.aggregation = Aggregation::Mean;
    } else {
      throw Error(ErrorCode::ConfigInvalid, "expected median or mean", std::string(key));
    }
  } else if (key == "range.smooth_window") {
    const int w = config_value(key, [&](const std::string& k) { return detail::parse_int(value, k); });
    if (w < 1) throw Error(ErrorCode::ConfigInvalid, "window must be >= 1", std::string(key));
    rng.smooth_window = static_cast<std::size_t>(w);
  } else {
    throw Error(ErrorCode::ConfigInvalid, "unknown configuration key", std::string(key));
  }
}

void PipelineConfig::validate() const {
  try {
    calibration.rig.validate();
    calibration.tof.validate();
    segment.classifier.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInvalid, e.message(), e.field());
  }
  if (segment.dilation_radius < 0) {
    throw Error(ErrorCode::ConfigInvalid, "dilation radius must be >= 0", "segment.dilation_radius");
  }
  if (segment.enabled && segment.classifier.mode == ClassifierMode::ExternalMask &&
      segment.external_mask_path.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "external-mask mode needs a mask path", "segment.mask_path");
  }
  if (!(range.min_soil_fraction >= 0.0 && range.min_soil_fraction <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "must lie in [0, 1]", "range.min_soil_fraction");
  }
  if (range.smooth_window < 1) {
    throw Error(ErrorCode::ConfigInvalid, "window must be >= 1", "range.smooth_window");
  }
  const auto& d = calibration.rig.depth_intrinsics;
  if (range.roi && !range.roi->fits(d.width, d.height)) {
    throw Error(ErrorCode::ConfigInvalid, "roi does not fit the depth frame", "range.roi");
  }
}

Roi PipelineConfig::effective_roi() const {
  const auto& d = calibration.rig.depth_intrinsics;
  return range.roi.value_or(Roi::full(d.width, d.height));
}

PipelineConfig load_pipeline_config(std::istream& in, CalibrationProfile calibration) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("malformed config: ") + e.message(),
                "line " + std::to_string(e.line()));
  }
  PipelineConfig config;
  config.calibration = std::move(calibration);
  for (const auto& [section, entries] : tree) {
    if (entries.empty()) {
      throw Error(ErrorCode::ConfigInvalid, "key outside a section", section);
    }
    for (const auto& [key, value] : entries) {
      set_config_value(config, section + "." + key, value.data());
    }
  }
  config.validate();
  return config;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path,
                                    CalibrationProfile calibration) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open pipeline config", path.string());
  return load_pipeline_config(in, std::move(calibration));
}

DirectorySource::DirectorySource(const std::filesystem::path& dir) : dir_(dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "not a directory", dir.string());
  }
  static const std::regex depth_re(R"((.+)_depth\.pgm)");
  static const std::regex rgb_re(R"((.+)_rgb\.ppm)");
  std::map<std::string, int> seen;  // bit 1 = depth, bit 2 = rgb
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, depth_re)) {
      seen[m[1]] |= 1;
    } else if (std::regex_match(name, m, rgb_re)) {
      seen[m[1]] |= 2;
    }
  }
  for (const auto& [stem, bits] : seen) {
    if (bits != 3) {
      throw Error(ErrorCode::PairingError,
                  std::string("frame '") + stem + "' has no matching " + (bits == 1 ? "rgb" : "depth") +
                      " file",
                  (dir / stem).string());
    }
    stems_.push_back(stem);
  }
}

std::optional<FramePair> DirectorySource::next() {
  if (cursor_ >= stems_.size()) return std::nullopt;
  const std::string& stem = stems_[cursor_];
  bool has_timestamp = false;
  FramePair pair{io::load_depth(dir_ / (stem + "_depth.pgm"), &has_timestamp),
                 io::load_rgb(dir_ / (stem + "_rgb.ppm"))};
  if (!has_timestamp) {
    // No recorded time: assume the camera's default 20 fps cadence.
    pair.depth.timestamp_ms = 50.0 * static_cast<double>(cursor_);
  }
  pair.rgb.timestamp_ms = pair.depth.timestamp_ms;
  ++cursor_;
  return pair;
}

SimulatorSource::SimulatorSource(SceneSpec spec, SimCamera camera, double speed_mm_per_frame,
                                 int frames, double frame_period_ms)
    : spec_(std::move(spec)),
      camera_(std::move(camera)),
      speed_(speed_mm_per_frame),
      frames_(frames),
      period_(frame_period_ms) {
  spec_.validate(camera_.tof);
}

std::optional<FramePair> SimulatorSource::next() {
  if (cursor_ >= frames_) return std::nullopt;
  const double length = spec_.profile_length_mm();
  double offset = cursor_ * speed_;
  if (length > 0.0) {
    offset = std::fmod(offset, length);
    if (offset < 0.0) offset += length;
  }
  RenderedPair r = render_pair(spec_, camera_, offset, cursor_ * period_);
  last_truth_ = std::move(r.truth);
  ++cursor_;
  return FramePair{std::move(r.depth), std::move(r.rgb)};
}

std::optional<FramePair> VectorSource::next() {
  if (cursor_ >= pairs_.size()) return std::nullopt;
  return pairs_[cursor_++];
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  config_.validate();
  try {
    alignment_ = build_alignment_map(config_.calibration.rig);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInvalid, e.message(), e.field());
  }
  if (config_.segment.enabled && config_.segment.classifier.mode == ClassifierMode::ExternalMask) {
    external_mask_ = io::load_mask(config_.segment.external_mask_path);
    const auto& d = config_.calibration.rig.depth_intrinsics;
    if (external_mask_->width != d.width || external_mask_->height != d.height) {
      throw Error(ErrorCode::ConfigInvalid, "external mask does not match the depth frame",
                  "segment.mask_path");
    }
  }
}

StageProducts Pipeline::process_detailed(const DepthFrame& depth, const RgbFrame& rgb) const {
  const auto& cal = config_.calibration;
  StageProducts p;
  p.decoded = decode_vertical(depth, cal.rig.depth_intrinsics, cal.tof);
  p.aligned = warp_rgb_to_depth(rgb, p.decoded, alignment_);
  if (!config_.segment.enabled) {
    p.mask = BinaryMask(depth.width, depth.height, 1);
    p.masked = p.decoded;
  } else {
    const BinaryMask raw = external_mask_ ? *external_mask_
                                          : classify_residue(p.aligned, config_.segment.classifier);
    p.mask = dilate(raw, config_.segment.dilation_radius);
    p.masked = apply_mask(p.decoded, p.mask);
  }
  p.estimate = estimate_distance(p.masked, config_.effective_roi(), config_.range.min_soil_fraction,
                                 config_.range.aggregation);
  return p;
}

GroundDistanceEstimate Pipeline::process(const DepthFrame& depth, const RgbFrame& rgb,
                                         FrameMetrics* metrics) const {
  const auto& cal = config_.calibration;
  const auto t0 = Clock::now();
  const VerticalDepthMap decoded = decode_vertical(depth, cal.rig.depth_intrinsics, cal.tof);
  const auto t1 = Clock::now();

  GroundDistanceEstimate estimate;
  Clock::time_point t2, t3, t4;
  if (!config_.segment.enabled) {
    t2 = t3 = Clock::now();
    estimate = estimate_distance(decoded, config_.effective_roi(), config_.range.min_soil_fraction,
                                 config_.range.aggregation);
    t4 = Clock::now();
  } else {
    BinaryMask raw;
    if (external_mask_) {
      t2 = Clock::now();
      raw = *external_mask_;
    } else {
      const AlignedRgbFrame aligned = warp_rgb_to_depth(rgb, decoded, alignment_);
      t2 = Clock::now();
      raw = classify_residue(aligned, config_.segment.classifier);
    }
    const VerticalDepthMap masked = apply_mask(decoded, dilate(raw, config_.segment.dilation_radius));
    t3 = Clock::now();
    estimate = estimate_distance(masked, config_.effective_roi(), config_.range.min_soil_fraction,
                                 config_.range.aggregation);
    t4 = Clock::now();
  }
  if (metrics) {
    metrics->decode_us = elapsed_us(t0, t1);
    metrics->align_us = elapsed_us(t1, t2);
    metrics->segment_us = elapsed_us(t2, t3);
    metrics->estimate_us = elapsed_us(t3, t4);
    metrics->end_to_end_us = elapsed_us(t0, t4);
  }
  return estimate;
}

PipelineRun run_pipeline(FrameSource& source, const PipelineConfig& config) {
  const Pipeline pipeline(config);
  std::optional<StreamSmoother> smoother;
  if (config.range.smooth_window > 1) smoother.emplace(config.range.smooth_window);

  PipelineRun run;
  std::optional<double> last_timestamp;
  while (auto pair = source.next()) {
    if (last_timestamp && !(pair->depth.timestamp_ms > *last_timestamp)) {
      throw Error(ErrorCode::UnorderedTimestamps, "frame source timestamps must strictly increase",
                  "frame " + std::to_string(run.estimates.size()));
    }
    last_timestamp = pair->depth.timestamp_ms;
    FrameMetrics m;
    m.frame_index = run.estimates.size();
    GroundDistanceEstimate e = pipeline.process(pair->depth, pair->rgb, &m);
    run.estimates.push_back(smoother ? smoother->push(e) : e);
    run.metrics.push_back(m);
  }
  if (run.estimates.empty()) throw Error(ErrorCode::SourceExhausted, "frame source produced no frames");
  return run;
}

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double rank = std::ceil(std::clamp(q, 0.0, 1.0) * static_cast<double>(samples.size()));
  const std::size_t idx = rank < 1.0 ? 0 : static_cast<std::size_t>(rank) - 1;
  return samples[std::min(idx, samples.size() - 1)];
}

BenchmarkReport benchmark(FrameSource& source, const PipelineConfig& config, std::size_t warmup,
                          std::size_t frames) {
  if (frames < 1) throw Error(ErrorCode::InvalidValue, "benchmark needs at least one frame", "frames");
  std::vector<FramePair> pairs;
  pairs.reserve(frames);
  while (pairs.size() < frames) {
    auto pair = source.next();
    if (!pair) break;
    pairs.push_back(std::move(*pair));
  }
  if (pairs.empty()) throw Error(ErrorCode::SourceExhausted, "frame source produced no frames");

  const Pipeline pipeline(config);
  BenchmarkReport report;
  std::vector<double> decode, align, segment, estimate, total;
  const std::size_t skip = std::min(warmup, pairs.size());
  Clock::time_point measured_start = Clock::now();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (k == skip) measured_start = Clock::now();
    FrameMetrics m;
    m.frame_index = k;
    report.estimates.push_back(pipeline.process(pairs[k].depth, pairs[k].rgb, &m));
    if (k < skip) continue;
    decode.push_back(m.decode_us);
    align.push_back(m.align_us);
    segment.push_back(m.segment_us);
    estimate.push_back(m.estimate_us);
    total.push_back(m.end_to_end_us);
  }
  report.frames = total.size();
  if (report.empty()) return report;
  report.wall_seconds = std::chrono::duration<double>(Clock::now() - measured_start).count();
  report.fps = static_cast<double>(report.frames) / report.wall_seconds;
  auto stats = [](const std::vector<double>& v) { return LatencyStats{percentile(v, 0.5), percentile(v, 0.95)}; };
  report.decode = stats(decode);
  report.align = stats(align);
  report.segment = stats(segment);
  report.estimate = stats(estimate);
  report.end_to_end = stats(total);
  return report;
}

}  // namespace soilrange
