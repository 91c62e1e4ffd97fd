#include "qqnet/scalespace.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qqnet/parallel.hpp"

namespace qqnet {

GaussianKernel make_kernel(double sigma, int order, double trunc_mult) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("make_kernel: sigma must be positive");
  }
  if (sigma < kMinSigma) {
    throw InvalidArgument("make_kernel: sigma " + std::to_string(sigma) +
                          " is below the supported minimum sigma >= 0.5");
  }
  if (order < 0 || order > 2) throw InvalidArgument("make_kernel: order must be 0, 1 or 2");
  if (!(trunc_mult > 0.0)) throw InvalidArgument("make_kernel: truncation must be positive");

  GaussianKernel k;
  k.sigma = sigma;
  k.order = order;
  k.radius = static_cast<int>(std::ceil(trunc_mult * sigma));
  const int r = k.radius;
  const double s = sigma * sigma;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));

  // Fill the non-negative half and mirror it so parity is exact.
  std::vector<double> half(static_cast<std::size_t>(r) + 1);
  for (int t = 0; t <= r; ++t) {
    const double x = t;
    const double g = norm * std::exp(-x * x / (2.0 * s));
    switch (order) {
      case 0: half[t] = g; break;
      case 1: half[t] = -x / s * g; break;
      default: half[t] = (x * x / (s * s) - 1.0 / s) * g; break;
    }
  }
  const double parity = order == 1 ? -1.0 : 1.0;

  if (order == 0) {
    double sum = half[0];
    for (int t = 1; t <= r; ++t) sum += 2.0 * half[t];
    for (auto& v : half) v /= sum;
  } else if (order == 1) {
    half[0] = 0.0;
    double moment = 0.0;  // sum_t t * tap(t), from both halves
    for (int t = 1; t <= r; ++t) moment += 2.0 * t * half[t];
    for (auto& v : half) v *= -1.0 / moment;
  } else {
    double sum = half[0];
    for (int t = 1; t <= r; ++t) sum += 2.0 * half[t];
    const double mean = sum / (2.0 * r + 1.0);
    for (auto& v : half) v -= mean;
    double moment = 0.0;  // sum_t t^2 * tap(t)
    for (int t = 1; t <= r; ++t) moment += 2.0 * t * t * half[t];
    for (auto& v : half) v *= 2.0 / moment;
  }

  k.taps.resize(2 * static_cast<std::size_t>(r) + 1);
  for (int t = 0; t <= r; ++t) {
    k.taps[r + t] = half[t];
    k.taps[r - t] = parity * half[t];
  }
  return k;
}

std::size_t reflect_index(long i, std::size_t n) noexcept {
  if (n == 1) return 0;
  const long period = 2 * (static_cast<long>(n) - 1);
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<long>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

namespace {

// out[x] = sum_j k(j) * in[x - j] over a padded line, using kernel parity to
// halve the multiplies. Zero-sum even kernels are applied to in[x -/+ j] - in[x],
// so constant input gives exactly zero. `pad` holds in[-r .. n-1+r].
void convolve_line(const double* pad, double* out, std::size_t n, const GaussianKernel& k) {
  const int r = k.radius;
  const double* centre = pad + r;
  const double c0 = k.order == 0 ? k.tap(0) : 0.0;
  for (std::size_t x = 0; x < n; ++x) out[x] = c0 * centre[x];
  for (int j = 1; j <= r; ++j) {
    const double c = k.tap(j);
    const double* lo = centre - j;  // in[x - j]
    const double* hi = centre + j;  // in[x + j]
    if (k.order == 0) {
      for (std::size_t x = 0; x < n; ++x) out[x] += c * (lo[x] + hi[x]);
    } else if (k.order == 1) {
      for (std::size_t x = 0; x < n; ++x) out[x] += c * (lo[x] - hi[x]);
    } else {
      for (std::size_t x = 0; x < n; ++x) out[x] += c * ((lo[x] - centre[x]) + (hi[x] - centre[x]));
    }
  }
}

void fill_padded_row(const ImagePlane& img, std::size_t y, int r, std::vector<double>& pad) {
  const std::size_t w = img.width();
  pad.resize(w + 2 * static_cast<std::size_t>(r));
  const auto row = img.row(y);
  for (long i = -r; i < static_cast<long>(w) + r; ++i) {
    pad[static_cast<std::size_t>(i + r)] =
        (i >= 0 && i < static_cast<long>(w)) ? row[i] : row[reflect_index(i, w)];
  }
}

ImagePlane row_pass(const ImagePlane& img, const GaussianKernel& k) {
  ImagePlane out(img.width(), img.height());
  std::vector<double> pad;
  for (std::size_t y = 0; y < img.height(); ++y) {
    fill_padded_row(img, y, k.radius, pad);
    convolve_line(pad.data(), out.row(y).data(), img.width(), k);
  }
  return out;
}

ImagePlane column_pass(const ImagePlane& img, const GaussianKernel& k) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const int r = k.radius;
  ImagePlane out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    double* dst = out.row(y).data();
    const double* mid = img.row(y).data();
    const double c0 = k.order == 0 ? k.tap(0) : 0.0;
    for (std::size_t x = 0; x < w; ++x) dst[x] = c0 * mid[x];
    for (int j = 1; j <= r; ++j) {
      const double c = k.tap(j);
      const double* lo = img.row(reflect_index(static_cast<long>(y) - j, h)).data();
      const double* hi = img.row(reflect_index(static_cast<long>(y) + j, h)).data();
      if (k.order == 0) {
        for (std::size_t x = 0; x < w; ++x) dst[x] += c * (lo[x] + hi[x]);
      } else if (k.order == 1) {
        for (std::size_t x = 0; x < w; ++x) dst[x] += c * (lo[x] - hi[x]);
      } else {
        for (std::size_t x = 0; x < w; ++x) dst[x] += c * ((lo[x] - mid[x]) + (hi[x] - mid[x]));
      }
    }
  }
  return out;
}

}  // namespace

ImagePlane convolve_separable(const ImagePlane& img, const GaussianKernel& kx,
                              const GaussianKernel& ky) {
  if (img.empty()) throw InvalidArgument("convolve_separable: empty image");
  return column_pass(row_pass(img, kx), ky);
}

ImagePlane smooth(const ImagePlane& img, double s, double trunc_mult) {
  if (s < 0.0) throw InvalidArgument("smooth: scale must be non-negative");
  if (s == 0.0) return img;
  const auto k = make_kernel(std::sqrt(s), 0, trunc_mult);
  return convolve_separable(img, k, k);
}

DerivativeSet derivatives(const ImagePlane& img, double s, double trunc_mult) {
  if (!(s > 0.0)) throw InvalidArgument("derivatives: scale must be positive");
  if (img.empty()) throw InvalidArgument("derivatives: empty image");
  const double sigma = std::sqrt(s);
  const auto k0 = make_kernel(sigma, 0, trunc_mult);
  const auto k1 = make_kernel(sigma, 1, trunc_mult);
  const auto k2 = make_kernel(sigma, 2, trunc_mult);

  const ImagePlane r0 = row_pass(img, k0);
  const ImagePlane r1 = row_pass(img, k1);
  const ImagePlane r2 = row_pass(img, k2);

  DerivativeSet d;
  d.s = s;
  d.L = column_pass(r0, k0);
  d.Lx = column_pass(r1, k0);
  d.Ly = column_pass(r0, k1);
  d.Lxx = column_pass(r2, k0);
  d.Lxy = column_pass(r1, k1);
  d.Lyy = column_pass(r0, k2);
  return d;
}

std::vector<double> ScaleSpaceStack::scales() const {
  std::vector<double> out;
  out.reserve(levels.size());
  for (const auto& l : levels) out.push_back(l.s);
  return out;
}

ScaleSpaceStack build_stack(const ImagePlane& img, std::span<const double> scales,
                            double trunc_mult) {
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (!(scales[i] > scales[i - 1])) {
      throw InvalidArgument("build_stack: scales must be strictly increasing");
    }
  }
  ScaleSpaceStack stack;
  stack.levels.resize(scales.size());
  parallel_for(scales.size(),
               [&](std::size_t i) { stack.levels[i] = derivatives(img, scales[i], trunc_mult); });
  return stack;
}

double normalize_derivative(double value, double s, int order, double gamma) {
  if (!(s > 0.0)) throw InvalidArgument("normalize_derivative: scale must be positive");
  if (order == 0) return value;
  return std::pow(s, order * gamma / 2.0) * value;
}

}  // namespace qqnet
