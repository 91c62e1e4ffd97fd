#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "qqnet/cascade.hpp"
#include "qqnet/image.hpp"

namespace oracle {

using qqnet::ImagePlane;

/// Square 2-D kernel of side 2 * radius + 1, row-major, k(dx, dy).
struct Kernel2D {
  int radius = 0;
  std::vector<double> w;
  double at(int dx, int dy) const {
    const int n = 2 * radius + 1;
    return w[static_cast<std::size_t>((dy + radius) * n + (dx + radius))];
  }
};

/// out(x, y) = sum k(t, u) in(x - t, y - u), reflect-101 borders.
ImagePlane convolve2d(const ImagePlane& img, const Kernel2D& k);

double gauss1d(double x, double s);
double gauss2d(double x, double y, double s);

/// Sampled directional derivative kernel of order 1 or 2 along phi, with
/// sum zero and directional moment -1 (order 1) or 2 (order 2).
Kernel2D rotated_derivative_kernel(double s, double phi, int order, int radius);

/// Sampled isotropic Gaussian with unit sum.
Kernel2D gaussian_kernel2d(double s, int radius);

/// Counts channels by enumerating every orientation tuple of every layer.
std::vector<std::size_t> enumerate_channel_counts(const qqnet::NetworkConfig& cfg);
std::size_t enumerate_descriptor_dimension(const qqnet::NetworkConfig& cfg, int planes);

/// Midpoint-rule integral of f over [a, b] with n cells.
double integrate(const std::function<double(double)>& f, double a, double b, std::size_t n);

ImagePlane random_image(std::size_t w, std::size_t h, std::uint64_t seed);
ImagePlane from_function(std::size_t w, std::size_t h,
                         const std::function<double(double, double)>& f);

double max_abs_diff(const ImagePlane& a, const ImagePlane& b, std::size_t band = 0);
double max_abs(const ImagePlane& a, std::size_t band = 0);

}  // namespace oracle
