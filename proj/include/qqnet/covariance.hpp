#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qqnet/cascade.hpp"
#include "qqnet/config.hpp"
#include "qqnet/image.hpp"

namespace qqnet {

/// Deviation statistics of one layer (k = 0 is F_0 = L) pooled over all
/// sigma0 instances and channels. Relative deviation is
/// sum |a - b| / sum |b| over matched interior pixels, so it stays defined
/// where individual values vanish.
struct LayerDeviation {
  int k = 0;
  double mean_relative = 0.0;  // pooled over channels
  double max_relative = 0.0;   // worst single channel
  double max_abs = 0.0;
  std::size_t pixels = 0;      // matched pixels per channel
  bool pass = false;
};

struct CovarianceReport {
  std::string transform;  // "scale" or "rotation"
  double S = 1.0;
  int quarter_turns = 0;
  double gamma = 0.0;
  double tolerance = 0.0;
  std::vector<LayerDeviation> layers;
  bool pass = false;

  json to_json() const;
};

/// Compares the network of `img` at sigma0 with that of resample(img, 1/S)
/// at sigma0 / S. The downsampled copy is the primed image, so
/// F'_k(x') = S^(k Gamma) F_k(x) at x = S (x' + 1/2) - 1/2; F' is divided by
/// S^(k Gamma) before comparison and F is sampled bilinearly at x.
CovarianceReport check_scale_covariance(const ImagePlane& img, double S, const NetworkConfig& cfg,
                                        double tol,
                                        ResampleMethod method = ResampleMethod::Bilinear);

/// Compares the network of rotate90(img, turns) against channel-permuted,
/// rotated maps of the original network.
CovarianceReport check_rotation_covariance(const ImagePlane& img, int quarter_turns,
                                           const NetworkConfig& cfg, double tol);

}  // namespace qqnet
