// SPDX-License-Identifier: Apache-2.0
//
// decode -> align -> segment -> mask -> estimate over a stream of frame pairs.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "soilrange/align.hpp"
#include "soilrange/calib.hpp"
#include "soilrange/range.hpp"
#include "soilrange/segment.hpp"
#include "soilrange/simscene.hpp"

namespace soilrange {

struct SegmentStageConfig {
  bool enabled = true;  // false: skip masking entirely, every valid pixel counts
  ColorClassifierConfig classifier;
  int dilation_radius = 2;
  std::filesystem::path external_mask_path;  // used when classifier.mode == ExternalMask
};

struct RangeStageConfig {
  std::optional<Roi> roi;  // nullopt = full depth frame
  double min_soil_fraction = kDefaultMinSoilFraction;
  Aggregation aggregation = Aggregation::Median;
  std::size_t smooth_window = 1;
};

struct PipelineConfig {
  CalibrationProfile calibration;
  SegmentStageConfig segment;
  RangeStageConfig range;

  /// Throws Error{ConfigInvalid} naming the offending key.
  void validate() const;
  Roi effective_roi() const;
};

/// Sets one documented key ("segment.dilation_radius", "range.roi", ...).
/// Throws Error{ConfigInvalid} for an unknown key or unparsable value.
void set_config_value(PipelineConfig& config, std::string_view key, std::string_view value);

/// Every key set_config_value accepts, with a one-line description.
const std::vector<std::pair<std::string_view, std::string_view>>& config_keys();

/// INI document with [segment] and [range] sections on top of a calibration.
PipelineConfig load_pipeline_config(std::istream& in, CalibrationProfile calibration);
PipelineConfig load_pipeline_config(const std::filesystem::path& path,
                                    CalibrationProfile calibration);

struct FramePair {
  DepthFrame depth;
  RgbFrame rgb;
};

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  /// nullopt once exhausted.
  virtual std::optional<FramePair> next() = 0;
};

/// Replays `NNNN_depth.pgm` / `NNNN_rgb.ppm` pairs in lexicographic stem
/// order. Throws Error{PairingError} at construction for any unpaired file.
class DirectorySource : public FrameSource {
 public:
  explicit DirectorySource(const std::filesystem::path& dir);
  std::optional<FramePair> next() override;
  std::size_t size() const { return stems_.size(); }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> stems_;
  std::size_t cursor_ = 0;
};

/// Renders frames on demand from a scene moving at constant speed.
class SimulatorSource : public FrameSource {
 public:
  SimulatorSource(SceneSpec spec, SimCamera camera, double speed_mm_per_frame, int frames,
                  double frame_period_ms = 50.0);
  std::optional<FramePair> next() override;

  /// Ground truth of the frame most recently returned by next().
  const GroundTruth& last_truth() const { return last_truth_; }

 private:
  SceneSpec spec_;
  SimCamera camera_;
  double speed_;
  int frames_;
  double period_;
  int cursor_ = 0;
  GroundTruth last_truth_;
};

/// In-memory pairs, emitted in order.
class VectorSource : public FrameSource {
 public:
  explicit VectorSource(std::vector<FramePair> pairs) : pairs_(std::move(pairs)) {}
  std::optional<FramePair> next() override;

 private:
  std::vector<FramePair> pairs_;
  std::size_t cursor_ = 0;
};

struct FrameMetrics {
  std::size_t frame_index = 0;
  double decode_us = 0.0;
  double align_us = 0.0;
  double segment_us = 0.0;  // classify + dilate + apply_mask
  double estimate_us = 0.0;
  double end_to_end_us = 0.0;
};

/// Intermediate products of one frame, for the stage-level CLI commands.
struct StageProducts {
  VerticalDepthMap decoded;
  AlignedRgbFrame aligned;
  BinaryMask mask;
  VerticalDepthMap masked;
  GroundDistanceEstimate estimate;
};

class Pipeline {
 public:
  /// Builds the alignment map and loads an external mask if configured.
  explicit Pipeline(PipelineConfig config);

  /// Unsmoothed estimate for one pair.
  GroundDistanceEstimate process(const DepthFrame& depth, const RgbFrame& rgb,
                                 FrameMetrics* metrics = nullptr) const;
  StageProducts process_detailed(const DepthFrame& depth, const RgbFrame& rgb) const;

  const PipelineConfig& config() const { return config_; }
  const AlignmentMap& alignment() const { return alignment_; }

 private:
  PipelineConfig config_;
  AlignmentMap alignment_;
  std::optional<BinaryMask> external_mask_;
};

struct PipelineRun {
  std::vector<GroundDistanceEstimate> estimates;
  std::vector<FrameMetrics> metrics;
};

/// One estimate and one metrics record per pair, in source order; smoothing
/// applied when range.smooth_window > 1. Throws Error{SourceExhausted} for an
/// empty source and Error{UnorderedTimestamps} if timestamps do not increase.
PipelineRun run_pipeline(FrameSource& source, const PipelineConfig& config);

struct LatencyStats {
  double p50_us = 0.0;
  double p95_us = 0.0;
};

struct BenchmarkReport {
  std::size_t frames = 0;  // measured (post-warmup) frames
  double wall_seconds = 0.0;
  double fps = 0.0;
  LatencyStats decode;
  LatencyStats align;
  LatencyStats segment;
  LatencyStats estimate;
  LatencyStats end_to_end;
  std::vector<GroundDistanceEstimate> estimates;  // all frames, warmup included

  bool empty() const { return frames == 0; }
};

/// Pulls warmup + frames pairs from the source up front so frame generation
/// is not timed, then runs them through the pipeline.
BenchmarkReport benchmark(FrameSource& source, const PipelineConfig& config, std::size_t warmup,
                          std::size_t frames);

/// Nearest-rank percentile of a sample (q in [0, 1]); 0 for an empty sample.
double percentile(std::vector<double> samples, double q);

}  // namespace soilrange
