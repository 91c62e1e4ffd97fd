#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "qqnet/benchmark.hpp"
#include "qqnet/covariance.hpp"
#include "qqnet/descriptor.hpp"
#include "qqnet/image_io.hpp"
#include "qqnet/oriented.hpp"
#include "qqnet/quad1d.hpp"

using namespace qqnet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool skipped = false;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const char* tag = o.skipped ? "SKIP" : (o.pass ? "PASS" : "FAIL");
  if (!o.skipped && !o.pass) ++failures;
  std::cout << "[" << tag << "] criterion " << std::setw(2) << id << "  " << name << "  ("
            << o.detail << "; " << std::fixed << std::setprecision(2) << secs << " s)" << std::endl;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ImagePlane bundled(const char* name) { return load_grey(fs::path(QQNET_DATA_DIR) / name); }

}  // namespace

int main() {
  report(1, "ripple-minimising C at s = s0", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const double c = optimal_C_numeric(1.0, 1.0);
    const double rel = std::abs(c - 8.0 / 11.0) / (8.0 / 11.0);
    const double secs = elapsed_since(t0);
    return Outcome{rel < 0.01 && secs < 5.0, "C = " + fmt(c) + ", rel err " + fmt(rel)};
  });

  report(2, "scale selection argmax, discrete pipeline, s0 = 64", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const QuadratureParams p;
    const auto grid = geometric_grid(1.0, 1024.0, std::pow(2.0, 1.0 / 16.0));
    bool ok = true;
    std::string detail;
    const double expected[] = {64.0, 64.0 / 3.0, 32.0};
    for (int n = 0; n <= 2; ++n) {
      std::size_t best = 0;
      double best_q = -1.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = discrete_q_at_origin(n, grid[i], 64.0, p);
        if (q > best_q) {
          best_q = q;
          best = i;
        }
      }
      const double rel = std::abs(grid[best] - expected[n]) / expected[n];
      ok = ok && rel < 0.10;
      detail += "n=" + std::to_string(n) + ": " + fmt(grid[best]) + " ";
    }
    ok = ok && elapsed_since(t0) < 30.0;
    return Outcome{ok, detail};
  });

  report(3, "Q at origin, discrete vs closed form, s in {16, 64, 256}", [] {
    const QuadratureParams p;
    double worst = 0.0;
    for (int n = 0; n <= 2; ++n)
      for (double s : {16.0, 64.0, 256.0}) {
        const double a = q_at_origin(n, s, 64.0, p);
        worst = std::max(worst, std::abs(discrete_q_at_origin(n, s, 64.0, p) - a) / a);
      }
    return Outcome{worst < 0.005, "worst rel err " + fmt(worst)};
  });

  report(4, "scale covariance, S = 2, Gamma in {0, 0.25}, two images", [] {
    const auto t0 = std::chrono::steady_clock::now();
    NetworkConfig cfg;
    cfg.sigma0_list = {2.0, 4.0};
    bool ok = true;
    double worst = 0.0;
    for (const char* name : {"camera256.pgm", "astronaut256.pgm"}) {
      const auto img = bundled(name);
      for (double gamma : {0.0, 0.25}) {
        cfg.qparams.Gamma = gamma;
        const auto rep = check_scale_covariance(img, 2.0, cfg, 0.05);
        for (const auto& l : rep.layers) worst = std::max(worst, l.mean_relative);
        ok = ok && rep.pass;
      }
    }
    const double secs = elapsed_since(t0);
    return Outcome{ok && secs < 120.0, "worst layer mean rel dev " + fmt(worst)};
  });

  report(5, "rotation covariance, quarter turn, M = 8", [] {
    NetworkConfig cfg;
    cfg.sigma0_list = {2.0, 4.0};
    double worst = 0.0;
    bool ok = true;
    for (const char* name : {"camera256.pgm", "astronaut256.pgm"}) {
      const auto rep = check_rotation_covariance(bundled(name), 1, cfg, 1e-9);
      for (const auto& l : rep.layers) worst = std::max(worst, l.mean_relative);
      ok = ok && rep.pass;
    }
    return Outcome{ok, "worst layer mean rel dev " + fmt(worst)};
  });

  report(6, "descriptor dimension 4000 and dimension law", [] {
    const NetworkConfig defaults;
    bool ok = descriptor_dimension(defaults) == 4000;
    std::mt19937 rng(2024);
    for (int i = 0; i < 5; ++i) {
      NetworkConfig cfg;
      cfg.M = 2 + static_cast<int>(rng() % 7);
      cfg.K = 2 + static_cast<int>(rng() % 4);
      cfg.num_layers = 1 + static_cast<int>(rng() % 5);
      cfg.sigma0_list.assign(1 + rng() % 4, 1.0);
      ok = ok && descriptor_dimension(cfg) == oracle::enumerate_descriptor_dimension(cfg, 1);
    }
    const auto d = compute_descriptor(bundled("camera256.pgm"), [] {
      NetworkConfig c;
      c.sigma0_list = {1.0, 2.0, 3.0, 4.0};
      return c;
    }());
    ok = ok && d.values.size() == 4000;
    return Outcome{ok, "default config " + std::to_string(descriptor_dimension(defaults)) + ", 5 random configs"};
  });

  report(7, "kernel sums and semigroup", [] {
    double worst_sum = 0.0;
    for (double sigma : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      for (int order = 0; order <= 2; ++order) {
        const auto k = make_kernel(sigma, order);
        double sum = 0.0;
        for (double w : k.taps) sum += w;
        worst_sum = std::max(worst_sum, std::abs(sum - (order == 0 ? 1.0 : 0.0)));
      }
    }
    const auto img = oracle::random_image(64, 64, 7);
    double worst_semi = 0.0;
    for (double s1 : {1.0, 4.0, 16.0})
      for (double s2 : {1.0, 4.0, 16.0}) {
        const auto band = static_cast<std::size_t>(std::ceil(4.0 * std::sqrt(s1 + s2)));
        worst_semi = std::max(worst_semi,
                              oracle::max_abs_diff(smooth(smooth(img, s1), s2), smooth(img, s1 + s2), band));
      }
    return Outcome{worst_sum < 1e-14 && worst_semi < 1e-3,
                   "sum err " + fmt(worst_sum) + ", semigroup " + fmt(worst_semi)};
  });

  report(8, "synthetic texture corpus, leave-one-out NNC", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = fs::temp_directory_path() / "qqnet_acceptance_synth";
    fs::remove_all(dir);
    write_synthetic_corpus(dir, 10, 64, 7);
    const auto ds = ingest_dataset(dir, DatasetLayout::FlatDirs, {SplitKind::LeaveOneOut, 0});
    BenchmarkOptions opts;
    opts.network.num_layers = 2;
    opts.network.sigma0_list = {1.0, 2.0};
    const auto rep = run_benchmark(ds, opts);
    fs::remove_all(dir);
    const double secs = elapsed_since(t0);
    return Outcome{rep.mean_accuracy == 1.0 && secs < 60.0, "accuracy " + fmt(rep.mean_accuracy)};
  });

  report(9, "KTH-TIPS2b reproduction", [] {
    const char* root = std::getenv("QQNET_KTH_ROOT");
    if (!root) return Outcome{false, "offline; run tools/run_kthtips2b.sh with the dataset", true};
    const auto ds = ingest_dataset(root, DatasetLayout::KthTips2b, {SplitKind::SampleHeldOut, 0});
    BenchmarkOptions opts;
    opts.border = BorderPolicy::Full;
    const auto rep = run_benchmark(ds, opts);
    return Outcome{std::abs(rep.mean_accuracy - 0.702) <= 0.02, "grey accuracy " + fmt(rep.mean_accuracy)};
  });

  report(10, "steering vs rotated kernels, s = 9", [] {
    const double s = 9.0;
    double worst = 0.0;
    for (std::uint64_t seed : {1u, 2u}) {
      const auto img = oracle::random_image(56, 48, seed);
      const auto d = derivatives(img, s);
      for (double phi : {std::numbers::pi / 8, 3 * std::numbers::pi / 8}) {
        const auto [l, ll] = steer(d, phi);
        const auto r1 = oracle::convolve2d(img, oracle::rotated_derivative_kernel(s, phi, 1, 18));
        const auto r2 = oracle::convolve2d(img, oracle::rotated_derivative_kernel(s, phi, 2, 18));
        worst = std::max(worst, oracle::max_abs_diff(l, r1) / oracle::max_abs(r1));
        worst = std::max(worst, oracle::max_abs_diff(ll, r2) / oracle::max_abs(r2));
      }
    }
    return Outcome{worst < 1e-6, "worst rel err " + fmt(worst)};
  });

  std::cout << (failures == 0 ? "all criteria met" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
