#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "qqnet/image_io.hpp"

using namespace qqnet;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  auto dir = fs::temp_directory_path() / (std::string("qqnet_io_") + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

}  // namespace

TEST(LoadImage, AsciiPgmScaledToUnit) {
  const auto dir = temp_dir();
  write_bytes(dir / "a.pgm", "P2\n# comment\n2 2\n255\n0 255\n255 0\n");
  const auto img = std::get<ImagePlane>(load_image(dir / "a.pgm"));
  EXPECT_EQ(img, ImagePlane(2, 2, std::vector<double>{0, 1, 1, 0}));
}

TEST(LoadImage, BinaryPgmMidValue) {
  const auto dir = temp_dir();
  write_bytes(dir / "b.pgm", std::string("P5\n1 1\n255\n") + static_cast<char>(128));
  const auto img = std::get<ImagePlane>(load_image(dir / "b.pgm"));
  EXPECT_NEAR(img(0, 0), 128.0 / 255.0, 1e-15);
}

TEST(LoadImage, SixteenBitPgm) {
  const auto dir = temp_dir();
  std::string data = "P5\n2 1\n65535\n";
  data += std::string("\xff\xff\x80\x00", 4);
  write_bytes(dir / "c.pgm", data);
  const auto img = std::get<ImagePlane>(load_image(dir / "c.pgm"));
  EXPECT_EQ(img(0, 0), 1.0);
  EXPECT_NEAR(img(1, 0), 32768.0 / 65535.0, 1e-15);
}

TEST(LoadImage, AsciiPpm) {
  const auto dir = temp_dir();
  write_bytes(dir / "d.ppm", "P3 1 1 255 255 0 51\n");
  const auto img = std::get<ColourImage>(load_image(dir / "d.ppm"));
  EXPECT_EQ(img.channels[0](0, 0), 1.0);
  EXPECT_EQ(img.channels[1](0, 0), 0.0);
  EXPECT_NEAR(img.channels[2](0, 0), 0.2, 1e-15);
}

TEST(LoadImage, PgmRoundTrip8And16Bit) {
  const auto dir = temp_dir();
  const auto img = oracle::random_image(9, 4, 5);
  save_pgm(dir / "r8.pgm", img);
  save_pgm(dir / "r16.pgm", img, false, 16);
  const auto a = load_grey(dir / "r8.pgm");
  const auto b = load_grey(dir / "r16.pgm");
  EXPECT_LE(oracle::max_abs_diff(a, img), 0.5 / 255.0 + 1e-12);
  EXPECT_LE(oracle::max_abs_diff(b, img), 0.5 / 65535.0 + 1e-12);
}

TEST(LoadImage, PngGreyAndRgbRoundTrip) {
  const auto dir = temp_dir();
  const auto grey = oracle::random_image(6, 5, 6);
  save_png(dir / "g.png", grey, 16);
  EXPECT_LE(oracle::max_abs_diff(std::get<ImagePlane>(load_image(dir / "g.png")), grey),
            0.5 / 65535.0 + 1e-12);
  ColourImage rgb;
  for (int c = 0; c < 3; ++c) rgb.channels[c] = oracle::random_image(6, 5, 20 + c);
  save_png(dir / "c.png", rgb, 8);
  const auto back = std::get<ColourImage>(load_image(dir / "c.png"));
  for (int c = 0; c < 3; ++c)
    EXPECT_LE(oracle::max_abs_diff(back.channels[c], rgb.channels[c]), 0.5 / 255.0 + 1e-12);
}

TEST(LoadImage, PngWithAlphaRejected) {
  const auto dir = temp_dir();
  save_png(dir / "a.png", ImagePlane(3, 3, 0.5), 8, true);
  try {
    load_image(dir / "a.png");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported channel layout"), std::string::npos);
  }
}

TEST(LoadImage, Errors) {
  const auto dir = temp_dir();
  EXPECT_THROW(load_image(dir / "missing.pgm"), DataError);
  write_bytes(dir / "x.bmp", "BM not an image");
  EXPECT_THROW(load_image(dir / "x.bmp"), DataError);
  write_bytes(dir / "z.pgm", "P2\n0 3\n255\n");
  EXPECT_THROW(load_image(dir / "z.pgm"), DataError);
  write_bytes(dir / "t.pgm", "P5\n4 4\n255\nab");
  EXPECT_THROW(load_image(dir / "t.pgm"), DataError);
}

TEST(LoadImage, BundledImages) {
  const fs::path data = QQNET_DATA_DIR;
  for (const char* name : {"camera256.pgm", "astronaut256.pgm"}) {
    const auto img = load_grey(data / name);
    EXPECT_EQ(img.width(), 256u);
    EXPECT_EQ(img.height(), 256u);
  }
  const auto colour = load_image(data / "chelsea_crop.ppm");
  ASSERT_TRUE(std::holds_alternative<ColourImage>(colour));
}
