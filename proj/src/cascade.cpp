#include "qqnet/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qqnet/oriented.hpp"
#include "qqnet/parallel.hpp"

namespace qqnet {

void NetworkConfig::validate() const {
  if (M < 2) throw InvalidArgument("M must be >= 2");
  if (K < 2) throw InvalidArgument("K must be >= 2");
  if (num_layers < 1) throw InvalidArgument("num_layers must be >= 1");
  if (!(r > 1.0) || !std::isfinite(r)) throw InvalidArgument("layer scale ratio r must be > 1");
  if (sigma0_list.empty()) throw InvalidArgument("sigma0_list must not be empty");
  for (double s0 : sigma0_list) {
    if (!(s0 >= kMinSigma)) throw InvalidArgument("every sigma0 must be >= 0.5");
  }
  if (!(post_smoothing >= 0.0)) throw InvalidArgument("post_smoothing must be >= 0");
  if (!(trunc_mult > 0.0)) throw InvalidArgument("trunc_mult must be positive");
  qparams.validate();
}

double NetworkConfig::layer_scale(double sigma0, int k) const {
  return sigma0 * sigma0 * std::pow(r, 2.0 * (k - 1));
}

double NetworkConfig::effective_sigma(double sigma0, int k) const {
  double acc = 0.0;
  for (int j = 1; j <= k; ++j) acc += layer_scale(sigma0, j);
  return std::sqrt(acc);
}

int NetworkConfig::arity(int k) const { return std::min(k, K - 1); }

std::size_t NetworkConfig::channel_count(int k) const {
  std::size_t n = 1;
  for (int i = 0; i < arity(k); ++i) n *= static_cast<std::size_t>(M);
  return n;
}

std::string OrientationTuple::to_string() const {
  if (indices.empty()) return "-";
  std::ostringstream os;
  for (std::size_t i = 0; i < indices.size(); ++i) os << (i ? "-" : "") << indices[i];
  return os.str();
}

std::size_t tuple_to_index(const OrientationTuple& t, int M) {
  std::size_t idx = 0;
  for (int v : t.indices) {
    if (v < 0 || v >= M) throw InvalidArgument("orientation index out of range");
    idx = idx * static_cast<std::size_t>(M) + static_cast<std::size_t>(v);
  }
  return idx;
}

OrientationTuple index_to_tuple(std::size_t index, int arity, int M) {
  OrientationTuple t;
  t.indices.assign(static_cast<std::size_t>(arity), 0);
  for (int i = arity - 1; i >= 0; --i) {
    t.indices[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(M));
    index /= static_cast<std::size_t>(M);
  }
  if (index != 0) throw InvalidArgument("channel index out of range for arity");
  return t;
}

LayerMaps pool_orientations(const LayerMaps& layer) {
  if (layer.arity < 1) throw InvalidArgument("pool_orientations: layer has no orientation index");
  LayerMaps out;
  out.k = layer.k;
  out.s = layer.s;
  out.M = layer.M;
  out.arity = layer.arity - 1;
  const std::size_t stride = layer.channels.size() / static_cast<std::size_t>(layer.M);
  out.channels.resize(stride);
  for (std::size_t rest = 0; rest < stride; ++rest) {
    ImagePlane acc = layer.channels[rest];
    for (int oldest = 1; oldest < layer.M; ++oldest) {
      const auto src = layer.channels[static_cast<std::size_t>(oldest) * stride + rest].values();
      auto dst = acc.values();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    out.channels[rest] = std::move(acc);
  }
  return out;
}

namespace {

// Runs layers 1..num_layers for one sigma0.
NetworkInstance run_instance(const ImagePlane& img, const NetworkConfig& cfg, std::size_t inst,
                             const CascadeOptions& options) {
  NetworkInstance out;
  out.sigma0 = cfg.sigma0_list[inst];
  const int M = cfg.M;
  const OrientationSet orientations(M);

  // Parents of layer 1: the raw image, whose derivatives at s_1 = s_0 are
  // those of L = F_0.
  LayerMaps parents;
  parents.k = 0;
  parents.M = M;
  parents.arity = 0;
  parents.channels.push_back(img);

  LayerMaps previous;
  for (int k = 1; k <= cfg.num_layers; ++k) {
    if (k >= cfg.K) parents = pool_orientations(previous);

    LayerMaps layer;
    layer.k = k;
    layer.s = cfg.layer_scale(out.sigma0, k);
    layer.M = M;
    layer.arity = cfg.arity(k);
    layer.channels.resize(parents.channels.size() * static_cast<std::size_t>(M));
    ImagePlane f0;

    parallel_for(parents.channels.size(), [&](std::size_t p) {
      DerivativeSet d = derivatives(parents.channels[p], layer.s, cfg.trunc_mult);
      for (int j = 0; j < M; ++j) {
        auto [lp, lpp] = steer(d, orientations.angle(j));
        ImagePlane q = quadrature_from_steered(lp, lpp, layer.s, cfg.qparams);
        if (cfg.post_smoothing > 0.0) q = post_smooth_qq(q, cfg.post_smoothing * layer.s);
        const std::size_t child = p * static_cast<std::size_t>(M) + static_cast<std::size_t>(j);
        if (options.observer) {
          options.observer(ChannelVisit{inst, k, layer.s, child, j, lp, lpp, q});
        }
        layer.channels[child] = std::move(q);
      }
      if (k == 1) f0 = std::move(d.L);
    });
    if (k == 1) out.F0 = std::move(f0);

    if (k < cfg.num_layers) {
      // Below K the next layer grows directly from F_k; from K on it grows
      // from the pooled F_k.
      LayerMaps& next_input = k + 1 >= cfg.K ? previous : parents;
      if (options.keep_layers)
        next_input = layer;
      else
        next_input = std::move(layer);
    }
    if (options.keep_layers) out.layers.push_back(std::move(layer));
  }
  return out;
}

}  // namespace

Network build_network(const ImagePlane& img, const NetworkConfig& cfg,
                      const CascadeOptions& options) {
  cfg.validate();
  if (img.empty()) throw InvalidArgument("build_network: empty image");
  Network net;
  net.config = cfg;

  const double smallest = static_cast<double>(std::min(img.width(), img.height()));
  for (double s0 : cfg.sigma0_list) {
    const double radius = std::ceil(cfg.trunc_mult * std::sqrt(cfg.layer_scale(s0, cfg.num_layers)));
    if (smallest < 2.0 * radius) {
      std::ostringstream os;
      os << "image " << img.width() << "x" << img.height() << " is smaller than twice the kernel "
         << "radius " << radius << " at the coarsest layer of sigma0 = " << s0
         << "; values near the border are dominated by reflection";
      net.warnings.push_back(os.str());
    }
  }

  net.instances.resize(cfg.sigma0_list.size());
  parallel_for(cfg.sigma0_list.size(), [&](std::size_t i) {
    net.instances[i] = run_instance(img, cfg, i, options);
  });
  return net;
}

}  // namespace qqnet
