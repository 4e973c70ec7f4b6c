// SPDX-License-Identifier: Apache-2.0

#include "soilrange/io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "soilrange/error.hpp"

namespace soilrange::io {

namespace {

struct PnmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
  double timestamp_ms = 0.0;
  bool has_timestamp = false;
};

// Reads the next header token, collecting "# timestamp_ms <v>" comments.
std::string next_token(std::istream& in, PnmHeader& header) {
  std::string token;
  while (true) {
    int c = in.peek();
    if (c == EOF) throw Error(ErrorCode::IoError, "truncated netpbm header");
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      std::istringstream cs(comment.substr(1));
      std::string key;
      double value = 0.0;
      if (cs >> key >> value && key == "timestamp_ms") {
        header.timestamp_ms = value;
        header.has_timestamp = true;
      }
      continue;
    }
    break;
  }
  while (in.peek() != EOF && !std::isspace(in.peek()) && in.peek() != '#') {
    token.push_back(static_cast<char>(in.get()));
  }
  return token;
}

PnmHeader read_header(std::istream& in, std::string_view expected_magic) {
  PnmHeader h;
  h.magic = next_token(in, h);
  if (h.magic != expected_magic) {
    throw Error(ErrorCode::IoError,
                "expected netpbm type " + std::string(expected_magic) + ", got '" + h.magic + "'");
  }
  try {
    h.width = std::stoi(next_token(in, h));
    h.height = std::stoi(next_token(in, h));
    h.maxval = std::stoi(next_token(in, h));
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::IoError, "malformed netpbm header");
  }
  if (h.width <= 0 || h.height <= 0 || h.maxval <= 0 || h.maxval > 65535) {
    throw Error(ErrorCode::IoError, "netpbm header values out of range");
  }
  in.get();  // single whitespace before the raster
  return h;
}

void write_header(std::ostream& out, const char* magic, int width, int height, int maxval,
                  double timestamp_ms) {
  out << magic << '\n'
      << "# timestamp_ms " << std::setprecision(17) << timestamp_ms << '\n'
      << width << ' ' << height << '\n'
      << maxval << '\n';
}

void read_raster(std::istream& in, char* dst, std::size_t bytes) {
  in.read(dst, static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) {
    throw Error(ErrorCode::IoError, "truncated netpbm raster");
  }
}

}  // namespace

void write_depth_pgm(std::ostream& out, const DepthFrame& frame) {
  write_header(out, "P5", frame.width, frame.height, 65535, frame.timestamp_ms);
  std::string raster(frame.gray.size() * 2, '\0');
  for (std::size_t i = 0; i < frame.gray.size(); ++i) {
    raster[2 * i] = static_cast<char>(frame.gray[i] >> 8);
    raster[2 * i + 1] = static_cast<char>(frame.gray[i] & 0xff);
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
}

DepthFrame read_depth_pgm(std::istream& in, bool* has_timestamp) {
  const PnmHeader h = read_header(in, "P5");
  if (has_timestamp) *has_timestamp = h.has_timestamp;
  DepthFrame frame(h.width, h.height, h.timestamp_ms);
  const std::size_t n = frame.gray.size();
  if (h.maxval > 255) {
    std::string raster(n * 2, '\0');
    read_raster(in, raster.data(), raster.size());
    for (std::size_t i = 0; i < n; ++i) {
      frame.gray[i] = static_cast<std::uint16_t>((static_cast<unsigned char>(raster[2 * i]) << 8) |
                                                 static_cast<unsigned char>(raster[2 * i + 1]));
    }
  } else {
    std::string raster(n, '\0');
    read_raster(in, raster.data(), raster.size());
    for (std::size_t i = 0; i < n; ++i) frame.gray[i] = static_cast<unsigned char>(raster[i]);
  }
  return frame;
}

void write_rgb_ppm(std::ostream& out, const RgbFrame& frame) {
  write_header(out, "P6", frame.width, frame.height, 255, frame.timestamp_ms);
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size() * 3));
}

RgbFrame read_rgb_ppm(std::istream& in) {
  const PnmHeader h = read_header(in, "P6");
  if (h.maxval > 255) throw Error(ErrorCode::IoError, "16-bit colour images are not supported");
  RgbFrame frame(h.width, h.height, h.timestamp_ms);
  static_assert(sizeof(Rgb) == 3);
  read_raster(in, reinterpret_cast<char*>(frame.pixels.data()), frame.pixels.size() * 3);
  return frame;
}

void write_aligned_ppm(std::ostream& out, const AlignedRgbFrame& frame) {
  RgbFrame img(frame.width, frame.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (frame.source_valid[i]) img.pixels[i] = frame.pixels[i];
  }
  write_rgb_ppm(out, img);
}

void write_mask_pgm(std::ostream& out, const BinaryMask& mask) {
  write_header(out, "P5", mask.width, mask.height, 255, 0.0);
  std::string raster(mask.bits.size(), '\0');
  for (std::size_t i = 0; i < raster.size(); ++i) raster[i] = mask.bits[i] ? char(255) : char(0);
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
}

BinaryMask read_mask_pgm(std::istream& in) {
  const DepthFrame raw = read_depth_pgm(in);
  BinaryMask mask(raw.width, raw.height, 0);
  for (std::size_t i = 0; i < raw.gray.size(); ++i) mask.bits[i] = raw.gray[i] != 0 ? 1 : 0;
  return mask;
}

void write_depth_preview_pgm(std::ostream& out, const VerticalDepthMap& z_map) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < z_map.z_mm.size(); ++i) {
    if (!z_map.valid[i]) continue;
    lo = any ? std::min(lo, z_map.z_mm[i]) : z_map.z_mm[i];
    hi = any ? std::max(hi, z_map.z_mm[i]) : z_map.z_mm[i];
    any = true;
  }
  write_header(out, "P5", z_map.width, z_map.height, 255, z_map.timestamp_ms);
  std::string raster(z_map.z_mm.size(), '\0');
  const double span = hi > lo ? hi - lo : 1.0;
  for (std::size_t i = 0; i < raster.size(); ++i) {
    if (!z_map.valid[i]) continue;
    raster[i] = static_cast<char>(1 + std::lround(254.0 * (hi - z_map.z_mm[i]) / span));
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
}

void write_point_cloud(std::ostream& out, const VerticalDepthMap& z_map,
                       const CameraIntrinsics& intr) {
  out << std::fixed << std::setprecision(3);
  for (int row = 0; row < z_map.height; ++row) {
    for (int col = 0; col < z_map.width; ++col) {
      const std::size_t i = z_map.index(col, row);
      if (!z_map.valid[i]) continue;
      const double z = z_map.z_mm[i];
      out << (col + 1.0 - intr.cx) * z / intr.focal_px << ' '
          << (row + 1.0 - intr.cy) * z / intr.focal_px << ' ' << z << '\n';
    }
  }
}

void write_estimates_csv(std::ostream& out, std::span<const GroundDistanceEstimate> estimates) {
  out << "timestamp_ms,distance_mm,valid,soil_fraction,extrapolated\n";
  out << std::setprecision(10);
  for (const auto& e : estimates) {
    out << e.timestamp_ms << ',';
    if (e.distance_mm) out << *e.distance_mm;
    out << ',' << (e.valid() ? 1 : 0) << ',' << e.soil_fraction << ',' << (e.extrapolated ? 1 : 0)
        << '\n';
  }
}

void write_metrics_csv(std::ostream& out, std::span<const FrameMetrics> metrics) {
  out << "frame_index,decode_us,align_us,segment_us,estimate_us,end_to_end_us\n";
  out << std::fixed << std::setprecision(1);
  for (const auto& m : metrics) {
    out << m.frame_index << ',' << m.decode_us << ',' << m.align_us << ',' << m.segment_us << ','
        << m.estimate_us << ',' << m.end_to_end_us << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open for writing", tmp.string());
    writer(out);
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed", tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot move temp file into place", path.string());
  }
}

namespace {

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open", path.string());
  return in;
}

template <class F>
auto with_path(const std::filesystem::path& path, F&& read) {
  auto in = open_binary(path);
  try {
    return read(in);
  } catch (const Error& e) {
    throw Error(e.code(), e.message(), path.string());
  }
}

}  // namespace

DepthFrame load_depth(const std::filesystem::path& path, bool* has_timestamp) {
  return with_path(path, [&](std::istream& in) { return read_depth_pgm(in, has_timestamp); });
}

RgbFrame load_rgb(const std::filesystem::path& path) {
  return with_path(path, [](std::istream& in) { return read_rgb_ppm(in); });
}

BinaryMask load_mask(const std::filesystem::path& path) {
  return with_path(path, [](std::istream& in) { return read_mask_pgm(in); });
}

}  // namespace soilrange::io
