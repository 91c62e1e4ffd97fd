#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qqnet/image.hpp"

using namespace qqnet;

TEST(ImagePlane, RejectsWrongDataLength) {
  EXPECT_THROW(ImagePlane(2, 2, std::vector<double>{1.0, 2.0, 3.0}), InvalidArgument);
}

TEST(Resample, ConstantStaysConstant) {
  const ImagePlane img(37, 21, 0.3);
  for (double f : {0.5, 0.37, 1.7, 2.0}) {
    for (auto m : {ResampleMethod::Bilinear, ResampleMethod::Bicubic}) {
      const auto out = resample(img, f, m);
      for (double v : out.values()) EXPECT_NEAR(v, 0.3, 1e-12);
    }
  }
}

TEST(Resample, FactorOneIsIdentity) {
  const auto img = oracle::random_image(19, 13, 1);
  EXPECT_EQ(resample(img, 1.0, ResampleMethod::Bilinear), img);
  EXPECT_EQ(resample(img, 1.0, ResampleMethod::Bicubic), img);
}

TEST(Resample, OutputDimsRounded) {
  const ImagePlane img(65, 10);
  const auto out = resample(img, 0.5);
  EXPECT_EQ(out.width(), 33u);
  EXPECT_EQ(out.height(), 5u);
}

TEST(Resample, RampHalvedHasDoubledSlope) {
  const auto ramp = oracle::from_function(64, 64, [](double x, double) { return x; });
  const auto out = resample(ramp, 0.5);
  ASSERT_EQ(out.width(), 32u);
  ASSERT_EQ(out.height(), 32u);
  // Output pixel i samples the input at 2 i + 0.5.
  for (std::size_t y = 0; y < 32; ++y)
    for (std::size_t x = 0; x < 32; ++x) EXPECT_NEAR(out(x, y), 2.0 * x + 0.5, 1e-12);
}

TEST(Resample, DegenerateSizeThrows) {
  EXPECT_THROW(resample(ImagePlane(3, 3), 0.1), InvalidArgument);
  EXPECT_THROW(resample(ImagePlane(3, 3), 0.0), InvalidArgument);
  EXPECT_THROW(resample(ImagePlane(3, 3), -1.0), InvalidArgument);
}

TEST(Rotate90, IdentityAndFullTurn) {
  const auto img = oracle::random_image(7, 5, 2);
  EXPECT_EQ(rotate90(img, 0), img);
  EXPECT_EQ(rotate90(img, 4), img);
  EXPECT_EQ(rotate90(img, -4), img);
}

TEST(Rotate90, Composition) {
  const auto img = oracle::random_image(7, 5, 3);
  EXPECT_EQ(rotate90(rotate90(img, 1), 1), rotate90(img, 2));
  EXPECT_EQ(rotate90(img, -1), rotate90(img, 3));
  for (int k = 0; k < 4; ++k) EXPECT_EQ(rotate90(rotate90(img, k), 4 - k), img);
}

TEST(Rotate90, OneTurnIndexMap) {
  const auto img = oracle::random_image(7, 5, 4);
  const auto r = rotate90(img, 1);
  ASSERT_EQ(r.width(), 5u);
  ASSERT_EQ(r.height(), 7u);
  for (std::size_t y = 0; y < 5; ++y)
    for (std::size_t x = 0; x < 7; ++x) EXPECT_EQ(r(y, 6 - x), img(x, y));
}

TEST(Luv, WhiteBlackGrey) {
  const Luv white = srgb_to_luv(1, 1, 1);
  EXPECT_NEAR(white.L, 100.0, 1e-9);
  EXPECT_NEAR(white.u, 0.0, 1e-9);
  EXPECT_NEAR(white.v, 0.0, 1e-9);
  const Luv black = srgb_to_luv(0, 0, 0);
  EXPECT_EQ(black.L, 0.0);
  EXPECT_EQ(black.u, 0.0);
  EXPECT_EQ(black.v, 0.0);
  for (double g : {0.01, 0.2, 0.5, 0.93}) {
    const Luv grey = srgb_to_luv(g, g, g);
    EXPECT_NEAR(grey.u, 0.0, 1e-9);
    EXPECT_NEAR(grey.v, 0.0, 1e-9);
  }
}

TEST(Luv, MidGreyLightness) {
  // sRGB 0.5 linearises to 0.21404; L* = 116 Y^(1/3) - 16.
  const double Y = std::pow((0.5 + 0.055) / 1.055, 2.4);
  EXPECT_NEAR(srgb_to_luv(0.5, 0.5, 0.5).L, 116.0 * std::cbrt(Y) - 16.0, 1e-9);
}

TEST(Luv, RescaledPlanesInUnitRange) {
  ColourImage img;
  for (int c = 0; c < 3; ++c) img.channels[c] = oracle::random_image(8, 8, 10 + c);
  const auto luv = rgb_to_luv(img);
  EXPECT_EQ(luv.space, Colourspace::LUV);
  for (const auto& ch : luv.channels)
    for (double v : ch.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  ColourImage white;
  for (auto& ch : white.channels) ch = ImagePlane(1, 1, 1.0);
  const auto w = rgb_to_luv(white);
  EXPECT_NEAR(w.channels[0](0, 0), 1.0, 1e-12);
  EXPECT_NEAR(w.channels[1](0, 0), 134.0 / 354.0, 1e-9);
}

TEST(SampleBilinear, InterpolatesAndClamps) {
  const auto ramp = oracle::from_function(4, 4, [](double x, double y) { return x + 10 * y; });
  EXPECT_NEAR(sample_bilinear(ramp, 1.25, 2.5), 26.25, 1e-12);
  EXPECT_NEAR(sample_bilinear(ramp, -3.0, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(sample_bilinear(ramp, 9.0, 3.0), 33.0, 1e-12);
}
