// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "soilrange/depth.hpp"
#include "soilrange/error.hpp"

namespace soilrange {
namespace {

const CameraIntrinsics kIntr = blaze101_intrinsics();
const TofConstants kTof = blaze101_tof();

VerticalDepthMap decode_single(int col, int row, std::uint16_t g) {
  DepthFrame f(kIntr.width, kIntr.height);
  f.gray[static_cast<std::size_t>(row) * f.width + col] = g;
  return decode_vertical(f, kIntr, kTof);
}

TEST(Depth, NearPrincipalPoint) {
  const VerticalDepthMap z = decode_single(312, 239, 23628);
  const std::size_t i = z.index(312, 239);
  ASSERT_TRUE(z.valid[i]);
  EXPECT_NEAR(z.z_mm[i], 517.11, 0.005);
  EXPECT_NEAR(angular_factor(312, 239, kIntr), 1.0000003, 1e-7);
}

TEST(Depth, ImageCorner) {
  // Pixel (1, 1): a = -312.05 / f, b = -238.60 / f.
  const VerticalDepthMap z = decode_single(0, 0, 30000);
  EXPECT_NEAR(angular_factor(0, 0, kIntr), 1.262301, 1e-6);
  ASSERT_TRUE(z.valid[0]);
  EXPECT_NEAR(z.z_mm[0], 520.274, 0.001);
  EXPECT_NEAR(z.z_mm[0], static_cast<double>(testing::vertical_from_gray(30000, 1.0, 1.0, kIntr, kTof)), 1e-9);
}

TEST(Depth, MatchesLongDoubleFormula) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> col(0, kIntr.width - 1), row(0, kIntr.height - 1);
  std::uniform_int_distribution<int> gray(20000, 65535);
  DepthFrame f(kIntr.width, kIntr.height);
  for (auto& g : f.gray) g = static_cast<std::uint16_t>(gray(rng));
  const VerticalDepthMap z = decode_vertical(f, kIntr, kTof);
  for (int k = 0; k < 2000; ++k) {
    const int c = col(rng), r = row(rng);
    const long double expect = testing::vertical_from_gray(f.at(c, r), c + 1, r + 1, kIntr, kTof);
    ASSERT_TRUE(z.valid[z.index(c, r)]);
    EXPECT_NEAR(z.z_mm[z.index(c, r)], static_cast<double>(expect), 1e-9);
  }
}

TEST(Depth, ZeroGrayIsInvalid) {
  const VerticalDepthMap z = decode_vertical(DepthFrame(kIntr.width, kIntr.height), kIntr, kTof);
  for (auto v : z.valid) ASSERT_EQ(v, 0);
}

TEST(Depth, OutOfWorkingRangeIsInvalid) {
  // 100 counts ~ 2.29 mm radial: far below the 300 mm minimum
  const VerticalDepthMap near = decode_single(312, 239, 100);
  EXPECT_FALSE(near.valid[near.index(312, 239)]);
}

TEST(Depth, MonotonicInGray) {
  for (int c : {0, 100, 312, 639}) {
    double prev = -1e9;
    for (int g = 20000; g <= 65535; g += 997) {
      const VerticalDepthMap z = decode_single(c, 0, static_cast<std::uint16_t>(g));
      const double now = z.z_mm[z.index(c, 0)];
      EXPECT_GT(now, prev);
      prev = now;
    }
  }
}

TEST(Depth, SameGrayReadsCloserAwayFromAxis) {
  const std::uint16_t g = 30000;
  const double centre = decode_single(312, 239, g).z_mm[decode_single(312, 239, g).index(312, 239)];
  const double corner = decode_single(0, 0, g).z_mm[0];
  EXPECT_LT(corner, centre);
}

TEST(Depth, EncodeInvertsDecodeExample) {
  VerticalDepthMap z(kIntr.width, kIntr.height);
  const std::size_t i = z.index(312, 239);
  z.z_mm[i] = 517.11;
  z.valid[i] = 1;
  const DepthFrame f = encode_gray(z, kIntr, kTof);
  EXPECT_EQ(f.gray[i], 23628);
  EXPECT_EQ(f.gray[0], 0);
}

TEST(Depth, RoundTripWithinOneQuantum) {
  // Encodable range only: 16 bits of 0.0229 mm reach ~1163 mm at the corners.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> zdist(300.0, 1150.0);
  VerticalDepthMap z(kIntr.width, kIntr.height);
  for (std::size_t i = 0; i < z.z_mm.size(); ++i) {
    z.z_mm[i] = zdist(rng);
    z.valid[i] = (i % 17) != 0;
  }
  const VerticalDepthMap back = decode_vertical(encode_gray(z, kIntr, kTof), kIntr, kTof);
  double worst = 0.0;
  for (std::size_t i = 0; i < z.z_mm.size(); ++i) {
    ASSERT_EQ(back.valid[i], z.valid[i]) << i;
    if (z.valid[i]) worst = std::max(worst, std::abs(back.z_mm[i] - z.z_mm[i]));
  }
  EXPECT_LE(worst, 0.029);
}

TEST(Depth, RangeEdgesSurviveRoundTrip) {
  VerticalDepthMap z(kIntr.width, kIntr.height);
  std::fill(z.valid.begin(), z.valid.end(), 1);
  for (double edge : {300.0, 300.004, 300.011}) {
    std::fill(z.z_mm.begin(), z.z_mm.end(), edge);
    const VerticalDepthMap back = decode_vertical(encode_gray(z, kIntr, kTof), kIntr, kTof);
    for (std::size_t i = 0; i < back.valid.size(); ++i) {
      ASSERT_TRUE(back.valid[i]) << edge << " @" << i;
      ASSERT_LE(std::abs(back.z_mm[i] - edge), 0.029);
    }
  }
}

TEST(Depth, EncodeBeyondSixteenBitsThrows) {
  VerticalDepthMap z(kIntr.width, kIntr.height);
  z.z_mm[0] = 2000.0;
  z.valid[0] = 1;
  try {
    encode_gray(z, kIntr, kTof);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RangeExceeded);
  }
}

TEST(Depth, EncodeDimensionMismatchThrows) {
  EXPECT_THROW(encode_gray(VerticalDepthMap(10, 10), kIntr, kTof), Error);
}

TEST(Depth, StatsUniform) {
  VerticalDepthMap z(kIntr.width, kIntr.height);
  std::fill(z.z_mm.begin(), z.z_mm.end(), 518.0);
  std::fill(z.valid.begin(), z.valid.end(), 1);
  const DepthSummary s = depth_stats(z, Roi{0, 0, z.width, z.height});
  EXPECT_EQ(s.count, static_cast<std::size_t>(z.width) * z.height);
  EXPECT_DOUBLE_EQ(s.median_mm, 518.0);
  EXPECT_DOUBLE_EQ(s.min_mm, 518.0);
  EXPECT_DOUBLE_EQ(s.max_mm, 518.0);
}

TEST(Depth, StatsAllInvalid) {
  const DepthSummary s = depth_stats(VerticalDepthMap(64, 48), Roi{0, 0, 64, 48});
  EXPECT_TRUE(s.empty());
  EXPECT_EQ(s.count, 0u);
}

TEST(Depth, StatsPlanePlusNoise) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 2.0);
  VerticalDepthMap z(kIntr.width, kIntr.height);
  for (std::size_t i = 0; i < z.z_mm.size(); ++i) {
    z.z_mm[i] = 518.0 + noise(rng);
    z.valid[i] = 1;
  }
  EXPECT_NEAR(depth_stats(z, Roi{0, 0, z.width, z.height}).median_mm, 518.0, 0.1);
}

TEST(Depth, StatsRoiOutOfBounds) {
  EXPECT_THROW(depth_stats(VerticalDepthMap(64, 48), Roi{60, 0, 10, 10}), Error);
}

TEST(Depth, MedianEvenAndOdd) {
  std::vector<double> odd{3, 1, 2};
  std::vector<double> even{4, 1, 3, 2};
  std::vector<double> none;
  EXPECT_EQ(median_inplace(odd), 2.0);
  EXPECT_EQ(median_inplace(even), 2.5);
  EXPECT_FALSE(median_inplace(none).has_value());
}

}  // namespace
}  // namespace soilrange
