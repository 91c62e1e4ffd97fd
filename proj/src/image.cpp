#include "qqnet/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace qqnet {

ImagePlane::ImagePlane(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), data_(width * height, fill) {}

ImagePlane::ImagePlane(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != width_ * height_) {
    throw InvalidArgument("ImagePlane: data length does not match width x height");
  }
}

namespace {

// Keys cubic convolution kernel, a = -0.5.
double cubic_weight(double t) {
  t = std::abs(t);
  if (t < 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
  if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
  return 0.0;
}

struct Tap {
  std::size_t index;
  double weight;
};

// Interpolation taps along one axis for every output coordinate.
std::vector<std::vector<Tap>> axis_taps(std::size_t in_size, std::size_t out_size, double factor,
                                        ResampleMethod method) {
  std::vector<std::vector<Tap>> taps(out_size);
  const auto last = static_cast<long>(in_size) - 1;
  auto clamp_index = [last](long i) { return static_cast<std::size_t>(std::clamp(i, 0L, last)); };
  for (std::size_t o = 0; o < out_size; ++o) {
    double src = (static_cast<double>(o) + 0.5) / factor - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(last));
    const double base = std::floor(src);
    const double frac = src - base;
    const auto i0 = static_cast<long>(base);
    auto& row = taps[o];
    if (frac == 0.0) {
      row.push_back({clamp_index(i0), 1.0});
      continue;
    }
    if (method == ResampleMethod::Bilinear) {
      row.push_back({clamp_index(i0), 1.0 - frac});
      row.push_back({clamp_index(i0 + 1), frac});
    } else {
      for (long k = -1; k <= 2; ++k) {
        row.push_back({clamp_index(i0 + k), cubic_weight(frac - static_cast<double>(k))});
      }
    }
  }
  return taps;
}

}  // namespace

ImagePlane resample(const ImagePlane& img, double factor, ResampleMethod method) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw InvalidArgument("resample: factor must be positive");
  }
  if (img.empty()) throw InvalidArgument("resample: empty image");
  const auto out_w = static_cast<std::size_t>(std::lround(static_cast<double>(img.width()) * factor));
  const auto out_h =
      static_cast<std::size_t>(std::lround(static_cast<double>(img.height()) * factor));
  if (out_w < 1 || out_h < 1) throw InvalidArgument("resample: degenerate output size");
  if (factor == 1.0) return img;

  const auto xt = axis_taps(img.width(), out_w, factor, method);
  const auto yt = axis_taps(img.height(), out_h, factor, method);

  ImagePlane horiz(out_w, img.height());
  for (std::size_t y = 0; y < img.height(); ++y) {
    const auto in = img.row(y);
    auto out = horiz.row(y);
    for (std::size_t x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (const auto& t : xt[x]) acc += t.weight * in[t.index];
      out[x] = acc;
    }
  }
  ImagePlane result(out_w, out_h);
  for (std::size_t y = 0; y < out_h; ++y) {
    auto out = result.row(y);
    for (const auto& t : yt[y]) {
      const auto in = horiz.row(t.index);
      for (std::size_t x = 0; x < out_w; ++x) out[x] += t.weight * in[x];
    }
  }
  return result;
}

ImagePlane rotate90(const ImagePlane& img, int quarter_turns) {
  const int k = ((quarter_turns % 4) + 4) % 4;
  if (k == 0) return img;
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  if (k == 2) {
    ImagePlane out(w, h);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) out(w - 1 - x, h - 1 - y) = img(x, y);
    return out;
  }
  ImagePlane out(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (k == 1)
        out(y, w - 1 - x) = img(x, y);
      else
        out(h - 1 - y, x) = img(x, y);
    }
  }
  return out;
}

namespace {

constexpr std::array<std::array<double, 3>, 3> kSrgbToXyz{{
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
}};

double srgb_linearize(double c) {
  c = std::clamp(c, 0.0, 1.0);
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

constexpr double kLuvMin = -134.0;
constexpr double kLuvMax = 220.0;

}  // namespace

Luv srgb_to_luv(double r, double g, double b) {
  const std::array<double, 3> lin{srgb_linearize(r), srgb_linearize(g), srgb_linearize(b)};
  std::array<double, 3> xyz{};
  std::array<double, 3> white{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      xyz[i] += kSrgbToXyz[i][j] * lin[j];
      white[i] += kSrgbToXyz[i][j];
    }
  }
  // White point taken from the matrix rows so that achromatic input lands
  // exactly on u* = v* = 0.
  const double yr = xyz[1] / white[1];
  constexpr double eps = 216.0 / 24389.0;
  constexpr double kappa = 24389.0 / 27.0;
  const double L = yr > eps ? 116.0 * std::cbrt(yr) - 16.0 : kappa * yr;
  const double denom = xyz[0] + 15.0 * xyz[1] + 3.0 * xyz[2];
  if (denom <= 0.0) return {0.0, 0.0, 0.0};
  const double wdenom = white[0] + 15.0 * white[1] + 3.0 * white[2];
  const double up = 4.0 * xyz[0] / denom - 4.0 * white[0] / wdenom;
  const double vp = 9.0 * xyz[1] / denom - 9.0 * white[1] / wdenom;
  return {L, 13.0 * L * up, 13.0 * L * vp};
}

ColourImage rgb_to_luv(const ColourImage& img) {
  ColourImage out;
  out.space = Colourspace::LUV;
  for (auto& c : out.channels) c = ImagePlane(img.width(), img.height());
  const auto r = img.channels[0].values();
  const auto g = img.channels[1].values();
  const auto b = img.channels[2].values();
  auto lo = out.channels[0].values();
  auto uo = out.channels[1].values();
  auto vo = out.channels[2].values();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Luv luv = srgb_to_luv(r[i], g[i], b[i]);
    lo[i] = std::clamp(luv.L / 100.0, 0.0, 1.0);
    uo[i] = std::clamp((luv.u - kLuvMin) / (kLuvMax - kLuvMin), 0.0, 1.0);
    vo[i] = std::clamp((luv.v - kLuvMin) / (kLuvMax - kLuvMin), 0.0, 1.0);
  }
  return out;
}

ImagePlane to_grey(const ColourImage& img) {
  ImagePlane out(img.width(), img.height());
  const auto r = img.channels[0].values();
  const auto g = img.channels[1].values();
  const auto b = img.channels[2].values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  return out;
}

double sample_bilinear(const ImagePlane& img, double x, double y) {
  const double maxx = static_cast<double>(img.width() - 1);
  const double maxy = static_cast<double>(img.height() - 1);
  x = std::clamp(x, 0.0, maxx);
  y = std::clamp(y, 0.0, maxy);
  const auto x0 = static_cast<std::size_t>(x);
  const auto y0 = static_cast<std::size_t>(y);
  const std::size_t x1 = std::min(x0 + 1, img.width() - 1);
  const std::size_t y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  const double top = (1.0 - fx) * img(x0, y0) + fx * img(x1, y0);
  const double bottom = (1.0 - fx) * img(x0, y1) + fx * img(x1, y1);
  return (1.0 - fy) * top + fy * bottom;
}

}  // namespace qqnet
