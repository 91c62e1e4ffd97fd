#include "qqnet/descriptor.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "qqnet/config.hpp"

namespace qqnet {

std::string_view feature_name(Feature f) {
  switch (f) {
    case Feature::dphi: return "dphi";
    case Feature::abs_dphi: return "abs_dphi";
    case Feature::dphiphi: return "dphiphi";
    case Feature::abs_dphiphi: return "abs_dphiphi";
    case Feature::qq: return "qq";
  }
  return "unknown";
}

DescriptorLayout::DescriptorLayout(const NetworkConfig& cfg, int planes) : cfg_(cfg), planes_(planes) {
  cfg_.validate();
  if (planes != 1 && planes != 3) throw InvalidArgument("descriptor planes must be 1 or 3");
  std::size_t offset = 0;
  for (int k = 0; k < cfg_.num_layers; ++k) {
    layer_offsets_.push_back(offset);
    offset += cfg_.channel_count(k + 1) * kFeatureCount;
  }
  block_ = offset;
  size_ = block_ * cfg_.sigma0_list.size() * static_cast<std::size_t>(planes_);
}

std::size_t DescriptorLayout::index(int plane, std::size_t instance, int layer,
                                    std::size_t channel, Feature f) const {
  return (static_cast<std::size_t>(plane) * cfg_.sigma0_list.size() + instance) * block_ +
         layer_offsets_[static_cast<std::size_t>(layer)] + channel * kFeatureCount +
         static_cast<std::size_t>(f);
}

DescriptorLayout::Entry DescriptorLayout::entry(std::size_t i) const {
  if (i >= size_) throw InvalidArgument("descriptor index out of range");
  Entry e;
  const std::size_t block_index = i / block_;
  std::size_t within = i % block_;
  const std::size_t instance = block_index % cfg_.sigma0_list.size();
  e.plane = static_cast<int>(block_index / cfg_.sigma0_list.size());
  e.sigma0 = cfg_.sigma0_list[instance];
  int k = cfg_.num_layers - 1;
  while (layer_offsets_[static_cast<std::size_t>(k)] > within) --k;
  within -= layer_offsets_[static_cast<std::size_t>(k)];
  e.layer = k;
  e.feature = static_cast<Feature>(within % kFeatureCount);
  e.tuple = index_to_tuple(within / kFeatureCount, cfg_.arity(k + 1), cfg_.M);
  return e;
}

std::size_t descriptor_dimension(const NetworkConfig& cfg, int planes) {
  return DescriptorLayout(cfg, planes).size();
}

std::size_t border_band(const NetworkConfig& cfg, double sigma0, int layer) {
  return static_cast<std::size_t>(std::ceil(3.0 * cfg.effective_sigma(sigma0, layer + 1)));
}

namespace {

void accumulate_plane(const ImagePlane& img, const NetworkConfig& cfg, const DescriptorOptions& options,
                      const DescriptorLayout& layout, int plane, std::vector<double>& values) {
  const std::size_t n_inst = cfg.sigma0_list.size();
  // bands[inst][k]
  std::vector<std::vector<std::size_t>> bands(n_inst, std::vector<std::size_t>(cfg.num_layers, 0));
  if (options.border == BorderPolicy::Interior) {
    for (std::size_t i = 0; i < n_inst; ++i) {
      for (int k = 0; k < cfg.num_layers; ++k) {
        const std::size_t b = border_band(cfg, cfg.sigma0_list[i], k);
        if (2 * b >= img.width() || 2 * b >= img.height()) {
          throw DataError("image " + std::to_string(img.width()) + "x" +
                          std::to_string(img.height()) +
                          " is too small after border exclusion (band " + std::to_string(b) +
                          " px at sigma0 = " + std::to_string(cfg.sigma0_list[i]) + ", layer " +
                          std::to_string(k) + ")");
        }
        bands[i][static_cast<std::size_t>(k)] = b;
      }
    }
  }

  const double g1 = 1.0 - cfg.qparams.Gamma;
  const double g2 = 1.0 - cfg.qparams.Gamma / 2.0;

  CascadeOptions copts;
  copts.keep_layers = false;
  copts.observer = [&](const ChannelVisit& v) {
    const int layer = v.k - 1;
    const std::size_t b = bands[v.instance][static_cast<std::size_t>(layer)];
    const double n1 = normalize_derivative(1.0, v.s, 1, g1);
    const double n2 = normalize_derivative(1.0, v.s, 2, g2);
    double sums[kFeatureCount] = {};
    const std::size_t x0 = b, x1 = v.q.width() - b;
    const std::size_t y0 = b, y1 = v.q.height() - b;
    for (std::size_t y = y0; y < y1; ++y) {
      const auto lp = v.L_phi.row(y);
      const auto lpp = v.L_phiphi.row(y);
      const auto q = v.q.row(y);
      double row[kFeatureCount] = {};
      for (std::size_t x = x0; x < x1; ++x) {
        const double d1 = n1 * lp[x];
        const double d2 = n2 * lpp[x];
        row[0] += d1;
        row[1] += std::abs(d1);
        row[2] += d2;
        row[3] += std::abs(d2);
        row[4] += q[x];
      }
      for (int f = 0; f < kFeatureCount; ++f) sums[f] += row[f];
    }
    const double count = static_cast<double>((x1 - x0) * (y1 - y0));
    for (int f = 0; f < kFeatureCount; ++f) {
      values[layout.index(plane, v.instance, layer, v.channel, static_cast<Feature>(f))] =
          sums[f] / count;
    }
  };
  build_network(img, cfg, copts);
}

}  // namespace

Descriptor compute_descriptor(const ImagePlane& img, const NetworkConfig& cfg,
                              const DescriptorOptions& options, std::string source_id) {
  Descriptor d;
  d.layout = DescriptorLayout(cfg, 1);
  d.values.assign(d.layout.size(), 0.0);
  d.source_id = std::move(source_id);
  d.border = options.border;
  accumulate_plane(img, cfg, options, d.layout, 0, d.values);
  return d;
}

Descriptor compute_descriptor(const ColourImage& img, const NetworkConfig& cfg,
                              const DescriptorOptions& options, std::string source_id) {
  const ColourImage luv = img.space == Colourspace::LUV ? img : rgb_to_luv(img);
  Descriptor d;
  d.layout = DescriptorLayout(cfg, 3);
  d.values.assign(d.layout.size(), 0.0);
  d.source_id = std::move(source_id);
  d.border = options.border;
  for (int p = 0; p < 3; ++p) accumulate_plane(luv.channels[p], cfg, options, d.layout, p, d.values);
  return d;
}

DescriptorPermutation rotation_permutation(const DescriptorLayout& layout, int quarter_turns) {
  const NetworkConfig& cfg = layout.config();
  const int M = cfg.M;
  const int turns = ((quarter_turns % 4) + 4) % 4;
  if ((turns * M) % 2 != 0) {
    throw InvalidArgument("rotation by this many quarter turns is not on the orientation grid");
  }
  const int shift = turns * M / 2;
  DescriptorPermutation perm;
  perm.target.resize(layout.size());
  perm.sign.resize(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    auto e = layout.entry(i);
    int wraps = 0;
    for (auto& t : e.tuple.indices) {
      const int moved = t - shift;
      wraps = moved < 0 ? (-moved + M - 1) / M : 0;
      t = moved + wraps * M;
    }
    // `wraps` now belongs to the newest index, the derivative direction.
    const double sign = (e.feature == Feature::dphi && wraps % 2 == 1) ? -1.0 : 1.0;
    std::size_t instance = 0;
    while (cfg.sigma0_list[instance] != e.sigma0) ++instance;
    perm.target[i] = layout.index(e.plane, instance, e.layer, tuple_to_index(e.tuple, M), e.feature);
    perm.sign[i] = sign;
  }
  return perm;
}

namespace {

json descriptor_config_json(const Descriptor& d) {
  return json{{"network", network_to_json(d.layout.config())},
              {"planes", d.layout.planes()},
              {"border", d.border == BorderPolicy::Interior ? "interior" : "full"}};
}

std::filesystem::path sidecar(const std::filesystem::path& base) {
  auto p = base;
  p += ".json";
  return p;
}

}  // namespace

void save_descriptor(const std::filesystem::path& base, const Descriptor& d) {
  if (d.values.size() != d.layout.size()) {
    throw InvalidArgument("descriptor values do not match its layout");
  }
  {
    std::ofstream out(base, std::ios::binary);
    if (!out) throw DataError("cannot write descriptor: " + base.string());
    for (double v : d.values) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      char bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
      out.write(bytes, 8);
    }
    if (!out) throw DataError("descriptor write failed: " + base.string());
  }
  const json cfg = descriptor_config_json(d);
  json entries = json::array();
  for (std::size_t i = 0; i < d.layout.size(); ++i) {
    const auto e = d.layout.entry(i);
    entries.push_back({e.plane, e.sigma0, e.layer, e.tuple.to_string(), feature_name(e.feature)});
  }
  const json meta{{"schema_version", kSchemaVersion},
                  {"source_id", d.source_id},
                  {"dimension", d.values.size()},
                  {"dtype", "float64"},
                  {"byte_order", "little"},
                  {"config", cfg},
                  {"config_hash", config_hash(cfg)},
                  {"plane_names", d.layout.planes() == 1 ? json{"grey"} : json{"L", "U", "V"}},
                  {"entry_fields", {"plane", "sigma0", "layer", "tuple", "feature"}},
                  {"entries", entries}};
  std::ofstream js(sidecar(base));
  if (!js) throw DataError("cannot write descriptor sidecar: " + sidecar(base).string());
  js << meta.dump(1) << '\n';
}

Descriptor load_descriptor(const std::filesystem::path& base) {
  std::ifstream js(sidecar(base));
  if (!js) throw DataError("cannot open descriptor sidecar: " + sidecar(base).string());
  json meta;
  try {
    js >> meta;
  } catch (const json::exception& e) {
    throw DataError("malformed descriptor sidecar: " + std::string(e.what()));
  }
  Descriptor d;
  try {
    const auto& cfg = meta.at("config");
    const NetworkConfig net = network_from_json(cfg.at("network"));
    d.layout = DescriptorLayout(net, cfg.at("planes").get<int>());
    d.border = cfg.at("border").get<std::string>() == "full" ? BorderPolicy::Full
                                                             : BorderPolicy::Interior;
    d.source_id = meta.at("source_id").get<std::string>();
    if (meta.at("config_hash").get<std::string>() != config_hash(cfg)) {
      throw DataError("descriptor sidecar config hash mismatch: " + base.string());
    }
    if (meta.at("dimension").get<std::size_t>() != d.layout.size()) {
      throw DataError("descriptor sidecar dimension disagrees with its layout");
    }
  } catch (const json::exception& e) {
    throw DataError("malformed descriptor sidecar: " + std::string(e.what()));
  }
  std::ifstream in(base, std::ios::binary);
  if (!in) throw DataError("cannot open descriptor: " + base.string());
  d.values.resize(d.layout.size());
  for (auto& v : d.values) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
      throw DataError("truncated descriptor file: " + base.string());
    }
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t{bytes[b]} << (8 * b);
    v = std::bit_cast<double>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("descriptor file longer than its layout: " + base.string());
  }
  return d;
}

}  // namespace qqnet
