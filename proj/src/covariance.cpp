#include "qqnet/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qqnet/parallel.hpp"

namespace qqnet {

namespace {

struct Accumulator {
  double diff = 0.0;
  double ref = 0.0;
  double max_abs = 0.0;
  double worst_channel = 0.0;
  std::size_t pixels = std::numeric_limits<std::size_t>::max();

  void add_channel(double d, double r, double mabs) {
    diff += d;
    ref += r;
    max_abs = std::max(max_abs, mabs);
    const double rel = r > 0.0 ? d / r : (d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    worst_channel = std::max(worst_channel, rel);
  }

  LayerDeviation finish(int k, double tol) const {
    LayerDeviation out;
    out.k = k;
    out.mean_relative =
        ref > 0.0 ? diff / ref : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    out.max_relative = worst_channel;
    out.max_abs = max_abs;
    out.pixels = pixels == std::numeric_limits<std::size_t>::max() ? 0 : pixels;
    out.pass = out.mean_relative < tol;
    return out;
  }
};

// Maps of layer k of one instance; k = 0 is F_0.
std::vector<const ImagePlane*> layer_planes(const NetworkInstance& inst, int k) {
  std::vector<const ImagePlane*> out;
  if (k == 0) {
    out.push_back(&inst.F0);
  } else {
    for (const auto& p : inst.layers[static_cast<std::size_t>(k - 1)].channels) out.push_back(&p);
  }
  return out;
}

std::size_t band_for(const NetworkConfig& cfg, double sigma0, int k) {
  const double sigma = k == 0 ? sigma0 : cfg.effective_sigma(sigma0, k);
  return static_cast<std::size_t>(std::ceil(3.0 * sigma));
}

void finalize(CovarianceReport& rep) {
  rep.pass = std::all_of(rep.layers.begin(), rep.layers.end(),
                         [](const LayerDeviation& l) { return l.pass; });
}

}  // namespace

CovarianceReport check_scale_covariance(const ImagePlane& img, double S, const NetworkConfig& cfg,
                                        double tol, ResampleMethod method) {
  cfg.validate();
  if (!(S >= 1.0) || !std::isfinite(S)) throw InvalidArgument("scale factor S must be >= 1");
  NetworkConfig coarse_cfg = cfg;
  for (auto& s0 : coarse_cfg.sigma0_list) s0 /= S;
  for (double s0 : coarse_cfg.sigma0_list) {
    if (s0 < kMinSigma) {
      throw InvalidArgument("sigma0 / S = " + std::to_string(s0) +
                            " is below the supported minimum 0.5; use larger sigma0");
    }
  }
  const ImagePlane coarse_img = S == 1.0 ? img : resample(img, 1.0 / S, method);

  Network fine, coarse;
  parallel_for(2, [&](std::size_t i) {
    if (i == 0)
      fine = build_network(img, cfg);
    else
      coarse = build_network(coarse_img, coarse_cfg);
  });

  CovarianceReport rep;
  rep.transform = "scale";
  rep.S = S;
  rep.gamma = cfg.qparams.Gamma;
  rep.tolerance = tol;
  const double W = static_cast<double>(img.width());
  const double H = static_cast<double>(img.height());
  for (int k = 0; k <= cfg.num_layers; ++k) {
    Accumulator acc;
    const double gain = k == 0 ? 1.0 : std::pow(S, k * cfg.qparams.Gamma);
    for (std::size_t inst = 0; inst < cfg.sigma0_list.size(); ++inst) {
      const auto band = static_cast<double>(band_for(cfg, cfg.sigma0_list[inst], k));
      const auto fine_maps = layer_planes(fine.instances[inst], k);
      const auto coarse_maps = layer_planes(coarse.instances[inst], k);
      // Coarse pixels whose fine-grid position lies inside the band.
      std::vector<std::size_t> xs, ys;
      for (std::size_t i = 0; i < coarse_img.width(); ++i) {
        const double x = S * (static_cast<double>(i) + 0.5) - 0.5;
        if (x >= band && x <= W - 1.0 - band) xs.push_back(i);
      }
      for (std::size_t j = 0; j < coarse_img.height(); ++j) {
        const double y = S * (static_cast<double>(j) + 0.5) - 0.5;
        if (y >= band && y <= H - 1.0 - band) ys.push_back(j);
      }
      if (xs.empty() || ys.empty()) {
        throw InvalidArgument("image too small for the scale covariance check at layer " +
                              std::to_string(k) + ", sigma0 = " +
                              std::to_string(cfg.sigma0_list[inst]));
      }
      acc.pixels = std::min(acc.pixels, xs.size() * ys.size());
      for (std::size_t c = 0; c < fine_maps.size(); ++c) {
        double d = 0.0, r = 0.0, mabs = 0.0;
        for (auto j : ys) {
          const double y = S * (static_cast<double>(j) + 0.5) - 0.5;
          for (auto i : xs) {
            const double x = S * (static_cast<double>(i) + 0.5) - 0.5;
            const double ref = sample_bilinear(*fine_maps[c], x, y);
            const double err = std::abs((*coarse_maps[c])(i, j) / gain - ref);
            d += err;
            r += std::abs(ref);
            mabs = std::max(mabs, err);
          }
        }
        acc.add_channel(d, r, mabs);
      }
    }
    rep.layers.push_back(acc.finish(k, tol));
  }
  finalize(rep);
  return rep;
}

CovarianceReport check_rotation_covariance(const ImagePlane& img, int quarter_turns,
                                           const NetworkConfig& cfg, double tol) {
  cfg.validate();
  const int turns = ((quarter_turns % 4) + 4) % 4;
  if ((turns * cfg.M) % 2 != 0) {
    throw InvalidArgument("rotation angle is not representable on the orientation grid (M = " +
                          std::to_string(cfg.M) + ")");
  }
  const int shift = turns * cfg.M / 2;
  const ImagePlane rotated = rotate90(img, turns);

  Network orig, rot;
  parallel_for(2, [&](std::size_t i) {
    if (i == 0)
      orig = build_network(img, cfg);
    else
      rot = build_network(rotated, cfg);
  });

  CovarianceReport rep;
  rep.transform = "rotation";
  rep.quarter_turns = turns;
  rep.gamma = cfg.qparams.Gamma;
  rep.tolerance = tol;
  const std::size_t w = rotated.width(), h = rotated.height();
  for (int k = 0; k <= cfg.num_layers; ++k) {
    Accumulator acc;
    for (std::size_t inst = 0; inst < cfg.sigma0_list.size(); ++inst) {
      const std::size_t band = band_for(cfg, cfg.sigma0_list[inst], k);
      if (2 * band >= w || 2 * band >= h) {
        throw InvalidArgument("image too small for the rotation covariance check at layer " +
                              std::to_string(k));
      }
      acc.pixels = std::min(acc.pixels, (w - 2 * band) * (h - 2 * band));
      const auto orig_maps = layer_planes(orig.instances[inst], k);
      const auto rot_maps = layer_planes(rot.instances[inst], k);
      const int arity = k == 0 ? 0 : cfg.arity(k);
      for (std::size_t c = 0; c < orig_maps.size(); ++c) {
        auto tuple = index_to_tuple(c, arity, cfg.M);
        for (auto& t : tuple.indices) t = ((t - shift) % cfg.M + cfg.M) % cfg.M;
        const ImagePlane expected = rotate90(*orig_maps[c], turns);
        const ImagePlane& actual = *rot_maps[tuple_to_index(tuple, cfg.M)];
        double d = 0.0, r = 0.0, mabs = 0.0;
        for (std::size_t y = band; y < h - band; ++y) {
          for (std::size_t x = band; x < w - band; ++x) {
            const double err = std::abs(actual(x, y) - expected(x, y));
            d += err;
            r += std::abs(expected(x, y));
            mabs = std::max(mabs, err);
          }
        }
        acc.add_channel(d, r, mabs);
      }
    }
    rep.layers.push_back(acc.finish(k, tol));
  }
  finalize(rep);
  return rep;
}

json CovarianceReport::to_json() const {
  json layers_json = json::array();
  for (const auto& l : layers) {
    layers_json.push_back({{"k", l.k},
                           {"mean_relative_deviation", l.mean_relative},
                           {"max_relative_deviation", l.max_relative},
                           {"max_abs_deviation", l.max_abs},
                           {"pixels", l.pixels},
                           {"pass", l.pass}});
  }
  json t{{"type", transform}};
  if (transform == "scale")
    t["S"] = S;
  else
    t["quarter_turns"] = quarter_turns;
  return json{{"schema_version", kSchemaVersion}, {"transform", t},       {"Gamma", gamma},
              {"tolerance", tolerance},            {"layers", layers_json}, {"pass", pass}};
}

}  // namespace qqnet
