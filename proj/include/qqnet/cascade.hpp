#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qqnet/image.hpp"
#include "qqnet/quad1d.hpp"
#include "qqnet/scalespace.hpp"

namespace qqnet {

/// Parameters of the hierarchy. Layer k (1-based) runs at
/// s_k = sigma0^2 * r^(2(k-1)); from layer K on, the oldest orientation index
/// is pooled so every layer has at most M^(K-1) channels.
struct NetworkConfig {
  int M = 8;
  int K = 3;
  int num_layers = 4;
  double r = 2.0;
  std::vector<double> sigma0_list{1.0, 2.0, 4.0, 8.0};
  QuadratureParams qparams;
  /// Post-smoothing of each Q map at s_int = post_smoothing * s_k; 0 is off.
  double post_smoothing = 0.0;
  double trunc_mult = kDefaultTruncation;

  void validate() const;

  double layer_scale(double sigma0, int k) const;
  /// sqrt(sum_{j<=k} s_j): the accumulated smoothing behind layer k.
  double effective_sigma(double sigma0, int k) const;
  /// Orientation-tuple length of layer k: min(k, K-1).
  int arity(int k) const;
  std::size_t channel_count(int k) const;
};

/// Orientation indices (oldest first) naming one channel.
struct OrientationTuple {
  std::vector<int> indices;

  std::string to_string() const;  // e.g. "3-0"; empty tuple is "-"
  friend bool operator==(const OrientationTuple&, const OrientationTuple&) = default;
};

/// Channel position <-> tuple for an arity-a layer over M orientations
/// (base-M digits, oldest index most significant).
std::size_t tuple_to_index(const OrientationTuple& t, int M);
OrientationTuple index_to_tuple(std::size_t index, int arity, int M);

/// Channel maps of one layer.
struct LayerMaps {
  int k = 0;
  double s = 0.0;
  int M = 0;
  int arity = 0;
  std::vector<ImagePlane> channels;

  OrientationTuple tuple(std::size_t i) const { return index_to_tuple(i, arity, M); }
};

/// Sums channels over the oldest orientation index; arity drops by one.
LayerMaps pool_orientations(const LayerMaps& layer);

/// One network instance started at a given sigma0.
struct NetworkInstance {
  double sigma0 = 0.0;
  ImagePlane F0;
  std::vector<LayerMaps> layers;  // layers[k-1] holds F_k
};

struct Network {
  NetworkConfig config;
  std::vector<NetworkInstance> instances;
  std::vector<std::string> warnings;
};

/// Everything a consumer sees while a child channel of layer k is formed:
/// the steered derivatives of its parent at s_k (un-normalised) and its map.
struct ChannelVisit {
  std::size_t instance = 0;
  int k = 0;
  double s = 0.0;
  std::size_t channel = 0;
  int orientation = 0;
  const ImagePlane& L_phi;
  const ImagePlane& L_phiphi;
  const ImagePlane& q;
};

struct CascadeOptions {
  bool keep_layers = true;
  /// Called once per child channel, possibly concurrently for distinct
  /// channels.
  std::function<void(const ChannelVisit&)> observer;
};

Network build_network(const ImagePlane& img, const NetworkConfig& cfg,
                      const CascadeOptions& options = {});

}  // namespace qqnet
