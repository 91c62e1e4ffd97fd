#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qqnet {

/// Bad parameters or violated preconditions (usage-level errors).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Unreadable or malformed input data.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense 2-D scalar field on a pixel grid, row-major, double precision.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(std::size_t width, std::size_t height, double fill = 0.0);
  ImagePlane(std::size_t width, std::size_t height, std::vector<double> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t x, std::size_t y) noexcept { return data_[y * width_ + x]; }
  double operator()(std::size_t x, std::size_t y) const noexcept { return data_[y * width_ + x]; }

  std::span<double> row(std::size_t y) noexcept { return {data_.data() + y * width_, width_}; }
  std::span<const double> row(std::size_t y) const noexcept {
    return {data_.data() + y * width_, width_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const ImagePlane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> data_;
};

enum class Colourspace { RGB, LUV };

struct ColourImage {
  ImagePlane channels[3];
  Colourspace space = Colourspace::RGB;

  std::size_t width() const noexcept { return channels[0].width(); }
  std::size_t height() const noexcept { return channels[0].height(); }
};

enum class ResampleMethod { Bilinear, Bicubic };

/// Rescales by `factor` using pixel-centre alignment: output pixel i samples
/// the input at (i + 0.5) / factor - 0.5. Output dims are round(input * factor).
ImagePlane resample(const ImagePlane& img, double factor,
                    ResampleMethod method = ResampleMethod::Bilinear);

/// Lossless rotation by k quarter turns. One turn maps input (x, y) to
/// output (y, W - 1 - x), so a direction at angle phi becomes phi - pi/2.
ImagePlane rotate90(const ImagePlane& img, int quarter_turns);

/// CIE L*u*v* (D65, sRGB transfer) before the fixed [0,1] rescale.
struct Luv {
  double L, u, v;
};
Luv srgb_to_luv(double r, double g, double b);

/// sRGB in [0,1] to L*u*v* rescaled channelwise to [0,1]
/// (L in [0,100], u and v in [-134,220]).
ColourImage rgb_to_luv(const ColourImage& img);

/// Rec. 601 luma; used to derive the grey descriptor from colour input.
ImagePlane to_grey(const ColourImage& img);

/// Bilinear sample at continuous pixel coordinates, clamped to the grid.
double sample_bilinear(const ImagePlane& img, double x, double y);

}  // namespace qqnet
