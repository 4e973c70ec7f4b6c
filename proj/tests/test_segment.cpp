// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "soilrange/error.hpp"
#include "soilrange/segment.hpp"
#include "soilrange/simscene.hpp"

namespace soilrange {
namespace {

AlignedRgbFrame uniform(int w, int h, Rgb c, std::uint8_t valid = 1) {
  AlignedRgbFrame f(w, h);
  std::fill(f.pixels.begin(), f.pixels.end(), c);
  std::fill(f.source_valid.begin(), f.source_valid.end(), valid);
  return f;
}

TEST(Segment, DarkSoilIsSoil) {
  const BinaryMask m = classify_residue(uniform(40, 30, {60, 45, 30}), {});
  EXPECT_EQ(m.soil_count(), 40u * 30u);
}

TEST(Segment, StrawYellowIsResidue) {
  const BinaryMask m = classify_residue(uniform(40, 30, {210, 190, 110}), {});
  EXPECT_EQ(m.soil_count(), 0u);
}

TEST(Segment, BrightGreyIsNotResidue) {
  // bright but not yellow: excess yellow = 0
  EXPECT_EQ(classify_residue(uniform(8, 8, {200, 200, 200}), {}).soil_count(), 64u);
}

TEST(Segment, MissingColourIsNeverSoil) {
  const BinaryMask m = classify_residue(uniform(40, 30, {60, 45, 30}, 0), {});
  EXPECT_EQ(m.soil_count(), 0u);
}

TEST(Segment, ThresholdsAreInclusive) {
  ColorClassifierConfig cfg;
  EXPECT_TRUE(is_residue({140, 130, 90}, cfg));   // sum 360, ey 90
  EXPECT_FALSE(is_residue({140, 129, 90}, cfg));  // sum 359
  EXPECT_TRUE(is_residue({150, 130, 120}, cfg));  // sum 400, ey 40
  EXPECT_FALSE(is_residue({150, 129, 121}, cfg)); // ey 37
}

TEST(Segment, ConfigValidation) {
  ColorClassifierConfig cfg;
  cfg.brightness_threshold = 300;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.excess_yellow_threshold = -600;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_NO_THROW(ColorClassifierConfig{}.validate());
}

TEST(Segment, RadiusZeroIsIdentity) {
  std::mt19937_64 rng(1);
  const BinaryMask m = testing::random_mask(50, 40, 0.2, rng);
  EXPECT_EQ(dilate(m, 0), m);
}

TEST(Segment, SinglePixelGrowsToSquare) {
  BinaryMask m(9, 9, 1);
  m.bits[4 * 9 + 4] = 0;
  const BinaryMask d = dilate(m, 1);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c)
      EXPECT_EQ(d.at(c, r), (std::abs(c - 4) <= 1 && std::abs(r - 4) <= 1) ? 0 : 1) << c << "," << r;
}

TEST(Segment, BorderCountsAsSoil) {
  BinaryMask m(5, 5, 1);
  EXPECT_EQ(dilate(m, 3), m);
  m.bits[0] = 0;
  const BinaryMask d = dilate(m, 2);
  EXPECT_EQ(d.soil_count(), 25u - 9u);
}

TEST(Segment, RadiusComposes) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const BinaryMask m = testing::random_mask(32, 32, 0.05, rng);
    EXPECT_EQ(dilate(m, 2), dilate(dilate(m, 1), 1));
    EXPECT_EQ(dilate(m, 3), dilate(dilate(m, 1), 2));
  }
}

TEST(Segment, MatchesBruteForceScan) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> radius(0, 6), dim(1, 45);
  for (int k = 0; k < 100; ++k) {
    const BinaryMask m = testing::random_mask(dim(rng), dim(rng), 0.08, rng);
    const int r = radius(rng);
    ASSERT_EQ(dilate(m, r), testing::brute_force_dilate(m, r)) << "case " << k << " radius " << r;
  }
}

TEST(Segment, NegativeRadiusRejected) {
  EXPECT_THROW(dilate(BinaryMask(4, 4), -1), Error);
}

TEST(Segment, CoverageNonIncreasingInRadius) {
  std::mt19937_64 rng(9);
  const BinaryMask m = testing::random_mask(120, 90, 0.01, rng);
  double prev = 1.0;
  for (int r = 0; r <= 8; ++r) {
    const double now = soil_coverage(dilate(m, r));
    EXPECT_LE(now, prev);
    prev = now;
  }
}

VerticalDepthMap noisy_map(int w, int h) {
  VerticalDepthMap z(w, h);
  for (std::size_t i = 0; i < z.z_mm.size(); ++i) {
    z.z_mm[i] = 500.0 + static_cast<double>(i % 37);
    z.valid[i] = (i % 5) != 0;
  }
  return z;
}

TEST(Segment, ApplyAllOnesKeepsInput) {
  const VerticalDepthMap z = noisy_map(30, 20);
  const VerticalDepthMap out = apply_mask(z, BinaryMask(30, 20, 1));
  EXPECT_EQ(out.valid, z.valid);
  EXPECT_EQ(out.z_mm, z.z_mm);
}

TEST(Segment, ApplyAllZerosInvalidatesAll) {
  const VerticalDepthMap out = apply_mask(noisy_map(30, 20), BinaryMask(30, 20, 0));
  for (auto v : out.valid) ASSERT_EQ(v, 0);
}

TEST(Segment, ApplyDimensionMismatch) {
  try {
    apply_mask(noisy_map(30, 20), BinaryMask(20, 30));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Segment, SimulatedStrawsMaskedExactly) {
  // Colour camera on the depth grid: every aligned colour comes from the
  // depth pixel itself, so the classifier sees the truth footprint.
  SimCamera cam{blaze101_profile().rig, blaze101_tof()};
  cam.rig.rgb_intrinsics = cam.rig.depth_intrinsics;
  cam.rig.translation_mm.setZero();

  SceneSpec spec;
  spec.noise_sigma_mm = 0.0;
  spec.straws = generate_scatter({.coverage = 0.3}, frame_footprint(cam.rig.depth_intrinsics, 518.0), 5);
  const RenderedPair pair = render_pair(spec, cam, 0.0);

  const VerticalDepthMap z = decode_vertical(pair.depth, cam.rig.depth_intrinsics, cam.tof);
  const AlignedRgbFrame aligned = warp_rgb_to_depth(pair.rgb, z, build_alignment_map(cam.rig));
  const int radius = 2;
  const VerticalDepthMap masked = apply_mask(z, dilate(classify_residue(aligned, {}), radius));

  BinaryMask truth(z.width, z.height, 1);
  for (std::size_t i = 0; i < truth.bits.size(); ++i) truth.bits[i] = pair.truth.residue_footprint[i] ? 0 : 1;
  const BinaryMask expected = dilate(truth, radius);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < truth.bits.size(); ++i) {
    const bool invalidated = z.valid[i] && !masked.valid[i];
    if (invalidated != (expected.bits[i] == 0)) ++mismatches;
  }
  EXPECT_EQ(mismatches, 0u);
}

}  // namespace
}  // namespace soilrange
