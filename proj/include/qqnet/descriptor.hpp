#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qqnet/cascade.hpp"
#include "qqnet/image.hpp"

namespace qqnet {

/// The five per-channel mean features, in storage order.
enum class Feature { dphi = 0, abs_dphi = 1, dphiphi = 2, abs_dphiphi = 3, qq = 4 };
inline constexpr int kFeatureCount = 5;
std::string_view feature_name(Feature f);

/// Where descriptor means are taken.
enum class BorderPolicy {
  Interior,  // exclude a band of ceil(3 * effective sigma) pixels
  Full,      // whole image domain
};

/// Deterministic index map of a descriptor. Order, outermost first:
/// plane (grey, or L/U/V), sigma0, layer k = 0..num_layers-1, channel of
/// F_{k+1} (orientation tuple, new orientation last), feature.
class DescriptorLayout {
 public:
  struct Entry {
    int plane = 0;
    double sigma0 = 0.0;
    int layer = 0;  // k: statistics of F_k measured along the new orientation
    OrientationTuple tuple;
    Feature feature = Feature::dphi;
  };

  DescriptorLayout() = default;
  DescriptorLayout(const NetworkConfig& cfg, int planes);

  std::size_t size() const noexcept { return size_; }
  int planes() const noexcept { return planes_; }
  const NetworkConfig& config() const noexcept { return cfg_; }

  std::size_t index(int plane, std::size_t instance, int layer, std::size_t channel,
                    Feature f) const;
  Entry entry(std::size_t i) const;

  /// Entries per (plane, sigma0) block.
  std::size_t block_size() const noexcept { return block_; }

 private:
  NetworkConfig cfg_;
  int planes_ = 1;
  std::size_t block_ = 0;
  std::size_t size_ = 0;
  std::vector<std::size_t> layer_offsets_;  // within a block, per layer k
};

/// 5 * sum_{k=0}^{L-1} M^min(k+1, K-1) * |sigma0| * planes.
std::size_t descriptor_dimension(const NetworkConfig& cfg, int planes = 1);

struct Descriptor {
  std::vector<double> values;
  DescriptorLayout layout;
  std::string source_id;
  BorderPolicy border = BorderPolicy::Interior;
};

struct DescriptorOptions {
  BorderPolicy border = BorderPolicy::Interior;
};

/// Band width (pixels) excluded around statistics of layer k for sigma0.
std::size_t border_band(const NetworkConfig& cfg, double sigma0, int layer);

Descriptor compute_descriptor(const ImagePlane& img, const NetworkConfig& cfg,
                              const DescriptorOptions& options = {}, std::string source_id = {});

/// Independent L, U, V descriptors concatenated.
Descriptor compute_descriptor(const ColourImage& img, const NetworkConfig& cfg,
                              const DescriptorOptions& options = {}, std::string source_id = {});

/// Block permutation induced by rotating the input by quarter turns:
/// rotated[target[i]] = sign[i] * original[i]. Every orientation index moves
/// by -turns * M/2 (mod M); the first-derivative mean changes sign when the
/// new orientation wraps past pi.
struct DescriptorPermutation {
  std::vector<std::size_t> target;
  std::vector<double> sign;
};
DescriptorPermutation rotation_permutation(const DescriptorLayout& layout, int quarter_turns);

/// Writes `<base>` (raw little-endian float64) and `<base>.json` (layout,
/// config and its hash, source id). `base` conventionally ends in ".qqd".
void save_descriptor(const std::filesystem::path& base, const Descriptor& d);
Descriptor load_descriptor(const std::filesystem::path& base);

}  // namespace qqnet
