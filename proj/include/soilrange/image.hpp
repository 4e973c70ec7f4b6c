// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace soilrange {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Axis-aligned rectangle in array indices (0-based, half-open).
struct Roi {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  static Roi full(int width, int height) { return {0, 0, width, height}; }

  std::size_t area() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool fits(int image_width, int image_height) const {
    return x >= 0 && y >= 0 && width > 0 && height > 0 &&
           x + width <= image_width && y + height <= image_height;
  }

  friend bool operator==(const Roi&, const Roi&) = default;
};

/// Row-major pixel count helper shared by every frame type.
inline std::size_t pixel_count(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace soilrange
