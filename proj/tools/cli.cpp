// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "soilrange/align.hpp"
#include "soilrange/calib.hpp"
#include "soilrange/depth.hpp"
#include "soilrange/error.hpp"
#include "soilrange/io.hpp"
#include "soilrange/pipeline.hpp"
#include "soilrange/range.hpp"
#include "soilrange/segment.hpp"
#include "soilrange/simscene.hpp"

namespace soilrange::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240518;

/// Shortest decimal that round-trips to the same double.
std::string exact(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(v);
}

struct CommonOptions {
  std::string profile;
  std::string config;
  std::vector<std::string> sets;
  std::string roi;
  std::optional<double> brightness;
  std::optional<double> excess_yellow;
  std::optional<int> dilation;
  std::optional<int> window;
  std::optional<double> min_soil;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--profile", o.profile, "Calibration profile (default: built-in Blaze-101 profile)");
  cmd->add_option("--config", o.config, "Pipeline config document");
  cmd->add_option("--set", o.sets, "Override one config key: section.key=value (repeatable)");
  cmd->add_option("--roi", o.roi, "range.roi: full | x,y,width,height");
  cmd->add_option("--brightness-threshold", o.brightness, "segment.brightness_threshold");
  cmd->add_option("--excess-yellow-threshold", o.excess_yellow, "segment.excess_yellow_threshold");
  cmd->add_option("--dilation-radius", o.dilation, "segment.dilation_radius");
  cmd->add_option("--window", o.window, "range.smooth_window");
  cmd->add_option("--min-soil-fraction", o.min_soil, "range.min_soil_fraction");
}

CalibrationProfile load_profile(const CommonOptions& o) {
  return o.profile.empty() ? blaze101_profile() : load_calibration(fs::path(o.profile));
}

PipelineConfig build_config(const CommonOptions& o) {
  CalibrationProfile cal = load_profile(o);
  PipelineConfig config;
  if (o.config.empty()) {
    config.calibration = std::move(cal);
  } else {
    config = load_pipeline_config(fs::path(o.config), std::move(cal));
  }
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigInvalid, "--set expects section.key=value", s);
    }
    set_config_value(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.roi.empty()) set_config_value(config, "range.roi", o.roi);
  if (o.brightness) set_config_value(config, "segment.brightness_threshold", exact(*o.brightness));
  if (o.excess_yellow) set_config_value(config, "segment.excess_yellow_threshold", exact(*o.excess_yellow));
  if (o.dilation) set_config_value(config, "segment.dilation_radius", std::to_string(*o.dilation));
  if (o.window) set_config_value(config, "range.smooth_window", std::to_string(*o.window));
  if (o.min_soil) set_config_value(config, "range.min_soil_fraction", exact(*o.min_soil));
  config.validate();
  return config;
}

std::string describe(const GroundDistanceEstimate& e) {
  std::ostringstream s;
  s << "distance_mm=" << (e.distance_mm ? exact(*e.distance_mm) : std::string("none"))
    << " valid=" << (e.valid() ? "true" : "false") << " soil_fraction=" << exact(e.soil_fraction);
  return s.str();
}

json latency_json(const LatencyStats& l) { return {{"p50_us", l.p50_us}, {"p95_us", l.p95_us}}; }

json report_json(const BenchmarkReport& r) {
  return {{"frames", r.frames},
          {"wall_seconds", r.wall_seconds},
          {"fps", r.fps},
          {"decode", latency_json(r.decode)},
          {"align", latency_json(r.align)},
          {"segment", latency_json(r.segment)},
          {"estimate", latency_json(r.estimate)},
          {"end_to_end", latency_json(r.end_to_end)}};
}

json run_summary(const PipelineRun& run) {
  std::size_t valid = 0;
  std::vector<double> distances;
  std::vector<double> e2e;
  for (const auto& e : run.estimates) {
    if (e.valid()) {
      ++valid;
      distances.push_back(*e.distance_mm);
    }
  }
  for (const auto& m : run.metrics) e2e.push_back(m.end_to_end_us);
  json j = {{"frames", run.estimates.size()},
            {"valid_frames", valid},
            {"invalid_frames", run.estimates.size() - valid},
            {"end_to_end_p50_us", percentile(e2e, 0.5)},
            {"end_to_end_p95_us", percentile(e2e, 0.95)}};
  if (!distances.empty()) j["median_distance_mm"] = *median_inplace(distances);
  return j;
}

void write_json(const fs::path& path, const json& j) {
  io::write_file_atomic(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

std::string frame_stem(int k) {
  std::ostringstream s;
  s << std::setw(4) << std::setfill('0') << k;
  return s.str();
}

SimCamera sim_camera(const PipelineConfig& config) {
  return {config.calibration.rig, config.calibration.tof};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"soilrange - ground distance under crop residue from TOF depth + RGB frames", "soilrange"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  CommonOptions common;
  std::string depth_path, rgb_path, out_path, dir_path, spec_path, metrics_path, summary_path,
      cloud_path, map_path, json_path, errors_text, preview_path;
  int frames = 1;
  int warmup = 10;
  double speed = 0.0;
  double period_ms = 50.0;
  std::optional<std::uint64_t> seed;

  auto* decode_cmd = app.add_subcommand("decode", "Decode a 16-bit TOF frame to vertical distance");
  decode_cmd->add_option("--depth", depth_path, "Depth frame (16-bit PGM)")->required();
  decode_cmd->add_option("--cloud", cloud_path, "Write valid pixels as an x y z point cloud");
  decode_cmd->add_option("--preview", preview_path, "Write an 8-bit depth preview PGM");
  add_common(decode_cmd, common);

  auto* align_cmd = app.add_subcommand("align", "Warp an RGB frame onto the depth grid");
  align_cmd->add_option("--depth", depth_path, "Depth frame (16-bit PGM)")->required();
  align_cmd->add_option("--rgb", rgb_path, "Colour frame (PPM)")->required();
  align_cmd->add_option("--out", out_path, "Aligned colour frame (PPM)")->required();
  align_cmd->add_option("--dump-map", map_path, "Write the eight alignment coefficients");
  add_common(align_cmd, common);

  auto* segment_cmd = app.add_subcommand("segment", "Residue mask on the depth grid");
  segment_cmd->add_option("--depth", depth_path, "Depth frame (16-bit PGM)")->required();
  segment_cmd->add_option("--rgb", rgb_path, "Colour frame (PPM)")->required();
  segment_cmd->add_option("--out", out_path, "Mask PGM (0 = residue, 255 = soil)")->required();
  segment_cmd->add_option("--cloud", cloud_path, "Write the masked depth as a point cloud");
  add_common(segment_cmd, common);

  auto* measure_cmd = app.add_subcommand("measure", "Single-shot ground distance for one pair");
  measure_cmd->add_option("--depth", depth_path, "Depth frame (16-bit PGM)")->required();
  measure_cmd->add_option("--rgb", rgb_path, "Colour frame (PPM)")->required();
  add_common(measure_cmd, common);

  auto* simulate_cmd = app.add_subcommand("simulate", "Render synthetic depth + RGB pairs");
  simulate_cmd->add_option("--spec", spec_path, "Scene document")->required();
  simulate_cmd->add_option("--frames", frames, "Number of frames")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--out", out_path, "Output directory")->required();
  simulate_cmd->add_option("--speed", speed, "Platform speed, mm per frame");
  simulate_cmd->add_option("--period-ms", period_ms, "Frame period")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", seed, "Seed for every random choice");
  add_common(simulate_cmd, common);

  auto* replay_cmd = app.add_subcommand("replay", "Run the pipeline over a directory of pairs");
  replay_cmd->add_option("--dir", dir_path, "Directory with NNNN_depth.pgm / NNNN_rgb.ppm")->required();
  replay_cmd->add_option("--out", out_path, "Estimates CSV (default: stdout)");
  replay_cmd->add_option("--metrics", metrics_path, "Per-frame latency CSV");
  replay_cmd->add_option("--summary", summary_path, "Summary JSON");
  add_common(replay_cmd, common);

  auto* bench_cmd = app.add_subcommand("bench", "Throughput over simulator frames");
  bench_cmd->add_option("--spec", spec_path, "Scene document")->required();
  auto* bench_frames =
      bench_cmd->add_option("--frames", frames, "Frames including warmup (default: warmup + 200)")
          ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--warmup", warmup, "Frames excluded from the report")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--speed", speed, "Platform speed, mm per frame");
  bench_cmd->add_option("--seed", seed, "Seed for every random choice");
  bench_cmd->add_option("--json", json_path, "Write the report as JSON");
  add_common(bench_cmd, common);

  auto* stats_cmd = app.add_subcommand("stats", "Mean, sample std and 95% t-interval of errors");
  stats_cmd->add_option("--errors", errors_text, "Comma-separated errors in mm")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: code=UsageError message=" << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (stats_cmd->parsed()) {
      std::vector<double> errors;
      std::istringstream in(errors_text);
      std::string token;
      while (std::getline(in, token, ',')) {
        double v = 0.0;
        const char* b = token.data();
        const char* e = b + token.size();
        while (b < e && *b == ' ') ++b;
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc{} || ptr != e) {
          err << "error: code=UsageError field=--errors message=not a number: '" << token << "'\n";
          return kExitUsage;
        }
        errors.push_back(v);
      }
      const ErrorStatistics s = error_statistics(errors);
      out << "n=" << s.n << " mean_mm=" << exact(s.mean_mm) << " sample_std_mm=" << exact(s.sample_std_mm)
          << " ci95_low_mm=" << exact(s.ci95_low_mm) << " ci95_high_mm=" << exact(s.ci95_high_mm)
          << '\n';
      return kExitOk;
    }

    const PipelineConfig config = build_config(common);
    const auto& cal = config.calibration;

    if (decode_cmd->parsed()) {
      const VerticalDepthMap z = decode_vertical(io::load_depth(depth_path), cal.rig.depth_intrinsics, cal.tof);
      const DepthSummary s = depth_stats(z, Roi::full(z.width, z.height));
      out << "count=" << s.count;
      if (!s.empty()) {
        out << " min_mm=" << exact(s.min_mm) << " max_mm=" << exact(s.max_mm)
            << " median_mm=" << exact(s.median_mm);
      }
      out << '\n';
      if (!cloud_path.empty()) {
        io::write_file_atomic(cloud_path, [&](std::ostream& o) {
          io::write_point_cloud(o, z, cal.rig.depth_intrinsics);
        });
      }
      if (!preview_path.empty()) {
        io::write_file_atomic(preview_path, [&](std::ostream& o) { io::write_depth_preview_pgm(o, z); });
      }
      return kExitOk;
    }

    if (align_cmd->parsed() || segment_cmd->parsed() || measure_cmd->parsed()) {
      const Pipeline pipeline(config);
      const StageProducts p = pipeline.process_detailed(io::load_depth(depth_path), io::load_rgb(rgb_path));
      if (align_cmd->parsed()) {
        io::write_file_atomic(out_path, [&](std::ostream& o) { io::write_aligned_ppm(o, p.aligned); });
        if (!map_path.empty()) {
          io::write_file_atomic(map_path, [&](std::ostream& o) {
            dump_alignment_map(o, pipeline.alignment());
          });
        }
        std::size_t sampled = 0;
        for (auto v : p.aligned.source_valid) sampled += v;
        out << "aligned_pixels=" << sampled << '\n';
      } else if (segment_cmd->parsed()) {
        io::write_file_atomic(out_path, [&](std::ostream& o) { io::write_mask_pgm(o, p.mask); });
        if (!cloud_path.empty()) {
          io::write_file_atomic(cloud_path, [&](std::ostream& o) {
            io::write_point_cloud(o, p.masked, cal.rig.depth_intrinsics);
          });
        }
        out << "soil_fraction=" << exact(soil_coverage(p.mask)) << '\n';
      } else {
        out << describe(p.estimate) << '\n';
      }
      return kExitOk;
    }

    if (simulate_cmd->parsed()) {
      const SceneSpec spec = load_scene(fs::path(spec_path), cal.rig.depth_intrinsics, seed.value_or(kDefaultSeed));
      fs::create_directories(out_path);
      SimulatorSource source(spec, sim_camera(config), speed, frames, period_ms);
      std::ostringstream truth_csv;
      truth_csv << "frame,timestamp_ms,true_distance_mm,coverage_fraction\n" << std::setprecision(17);
      for (int k = 0; k < frames; ++k) {
        const FramePair pair = *source.next();
        const GroundTruth& truth = source.last_truth();
        const std::string stem = frame_stem(k);
        const fs::path dir(out_path);
        io::write_file_atomic(dir / (stem + "_depth.pgm"), [&](std::ostream& o) { io::write_depth_pgm(o, pair.depth); });
        io::write_file_atomic(dir / (stem + "_rgb.ppm"), [&](std::ostream& o) { io::write_rgb_ppm(o, pair.rgb); });
        BinaryMask footprint(truth.width, truth.height, 1);
        for (std::size_t i = 0; i < footprint.bits.size(); ++i) footprint.bits[i] = truth.residue_footprint[i] ? 0 : 1;
        io::write_file_atomic(dir / (stem + "_truth.pgm"), [&](std::ostream& o) { io::write_mask_pgm(o, footprint); });
        truth_csv << k << ',' << pair.depth.timestamp_ms << ',' << truth.true_distance_mm << ','
                  << truth.coverage_fraction << '\n';
      }
      io::write_file_atomic(fs::path(out_path) / "truth.csv", [&](std::ostream& o) { o << truth_csv.str(); });
      io::write_file_atomic(fs::path(out_path) / "scene.resolved", [&](std::ostream& o) { write_scene(o, spec); });
      out << "frames=" << frames << " out=" << out_path << '\n';
      return kExitOk;
    }

    if (replay_cmd->parsed()) {
      DirectorySource source{fs::path(dir_path)};
      const PipelineRun run = run_pipeline(source, config);
      if (out_path.empty()) {
        io::write_estimates_csv(out, run.estimates);
      } else {
        io::write_file_atomic(out_path, [&](std::ostream& o) { io::write_estimates_csv(o, run.estimates); });
      }
      if (!metrics_path.empty()) {
        io::write_file_atomic(metrics_path, [&](std::ostream& o) { io::write_metrics_csv(o, run.metrics); });
      }
      if (!summary_path.empty()) write_json(summary_path, run_summary(run));
      return kExitOk;
    }

    if (bench_cmd->parsed()) {
      if (bench_frames->count() == 0) frames = warmup + 200;
      const SceneSpec spec = load_scene(fs::path(spec_path), cal.rig.depth_intrinsics, seed.value_or(kDefaultSeed));
      SimulatorSource source(spec, sim_camera(config), speed, frames);
      const BenchmarkReport r = benchmark(source, config, static_cast<std::size_t>(warmup),
                                          static_cast<std::size_t>(frames));
      if (r.empty()) {
        out << "frames=0 (every frame was warmup)\n";
      } else {
        out << std::fixed << std::setprecision(1) << "frames=" << r.frames << " fps=" << r.fps << '\n';
        const std::pair<const char*, const LatencyStats*> rows[] = {
            {"decode", &r.decode}, {"align", &r.align}, {"segment", &r.segment},
            {"estimate", &r.estimate}, {"end_to_end", &r.end_to_end}};
        for (const auto& [name, l] : rows) {
          out << name << " p50_us=" << l->p50_us << " p95_us=" << l->p95_us << '\n';
        }
      }
      if (!json_path.empty()) write_json(json_path, report_json(r));
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: code=" << to_string(e.code());
    if (!e.field().empty()) err << " field=" << e.field();
    err << " message=" << e.message() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: code=Internal message=" << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace soilrange::cli
