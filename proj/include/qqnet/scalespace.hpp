#pragma once

#include <span>
#include <vector>

#include "qqnet/image.hpp"

namespace qqnet {

/// Smallest supported kernel sigma; sampled kernels alias below this.
inline constexpr double kMinSigma = 0.5;
/// Default truncation radius in units of sigma.
inline constexpr double kDefaultTruncation = 6.0;

/// Sampled Gaussian (derivative) kernel on integer offsets -radius..radius.
///
/// Normalisation makes the discrete kernel reproduce low-order polynomials
/// exactly: order 0 sums to 1; order 1 sums to 0 with first moment -1;
/// order 2 sums to 0 with second moment 2. Convolution is
/// out(x) = sum_t tap(t) * in(x - t).
struct GaussianKernel {
  double sigma = 0.0;
  int order = 0;
  int radius = 0;
  std::vector<double> taps;

  double tap(int offset) const { return taps[static_cast<std::size_t>(offset + radius)]; }
};

GaussianKernel make_kernel(double sigma, int order, double trunc_mult = kDefaultTruncation);

/// Reflect-101 index: ... 2 1 | 0 1 2 ... n-1 | n-2 ...
std::size_t reflect_index(long i, std::size_t n) noexcept;

/// Separable convolution: `kx` along rows, then `ky` along columns, with
/// reflect-101 border extension.
ImagePlane convolve_separable(const ImagePlane& img, const GaussianKernel& kx,
                              const GaussianKernel& ky);

/// Gaussian smoothing at variance s (pixel^2). s == 0 returns the input.
ImagePlane smooth(const ImagePlane& img, double s, double trunc_mult = kDefaultTruncation);

/// Smoothed image and its partial derivatives up to order two at one scale,
/// not scale-normalised.
struct DerivativeSet {
  double s = 0.0;
  ImagePlane L, Lx, Ly, Lxx, Lxy, Lyy;
};

DerivativeSet derivatives(const ImagePlane& img, double s,
                          double trunc_mult = kDefaultTruncation);

/// Multi-scale stack of derivative sets over strictly increasing scales.
struct ScaleSpaceStack {
  std::vector<DerivativeSet> levels;

  std::vector<double> scales() const;
};

ScaleSpaceStack build_stack(const ImagePlane& img, std::span<const double> scales,
                            double trunc_mult = kDefaultTruncation);

/// s^(n*gamma/2) * value.
double normalize_derivative(double value, double s, int order, double gamma);

}  // namespace qqnet
