#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qqnet/benchmark.hpp"
#include "qqnet/config.hpp"
#include "qqnet/covariance.hpp"
#include "qqnet/descriptor.hpp"
#include "qqnet/image_io.hpp"
#include "qqnet/parallel.hpp"
#include "qqnet/quad1d.hpp"
#include "qqnet/scalespace.hpp"

namespace fs = std::filesystem;
using namespace qqnet;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kProperty = 3 };

struct PropertyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Network fields that may be overridden on the command line.
struct NetworkFlags {
  CLI::Option* M = nullptr;
  CLI::Option* K = nullptr;
  CLI::Option* layers = nullptr;
  CLI::Option* r = nullptr;
  CLI::Option* sigma0 = nullptr;
  CLI::Option* C = nullptr;
  CLI::Option* gamma = nullptr;
  CLI::Option* post = nullptr;
  CLI::Option* trunc = nullptr;
  NetworkConfig values;

  void add(CLI::App* cmd) {
    M = cmd->add_option("--M", values.M, "number of orientations");
    K = cmd->add_option("--K", values.K, "layer at which orientation pooling starts");
    layers = cmd->add_option("--layers", values.num_layers, "number of layers");
    r = cmd->add_option("--r", values.r, "scale ratio between layers");
    sigma0 = cmd->add_option("--sigma0", values.sigma0_list, "initial sigma values");
    C = cmd->add_option("--C", values.qparams.C, "second-order weight");
    gamma = cmd->add_option("--gamma", values.qparams.Gamma, "scale normalisation parameter Gamma");
    post = cmd->add_option("--post-smoothing", values.post_smoothing,
                           "post-smoothing variance as a multiple of s_k (0 = off)");
    trunc = cmd->add_option("--trunc", values.trunc_mult, "kernel truncation in sigmas");
  }

  void apply(NetworkConfig& cfg) const {
    if (M->count()) cfg.M = values.M;
    if (K->count()) cfg.K = values.K;
    if (layers->count()) cfg.num_layers = values.num_layers;
    if (r->count()) cfg.r = values.r;
    if (sigma0->count()) cfg.sigma0_list = values.sigma0_list;
    if (C->count()) cfg.qparams.C = values.qparams.C;
    if (gamma->count()) cfg.qparams.Gamma = values.qparams.Gamma;
    if (post->count()) cfg.post_smoothing = values.post_smoothing;
    if (trunc->count()) cfg.trunc_mult = values.trunc_mult;
  }
};

struct Globals {
  std::string config_path;
  unsigned threads = 0;
  CLI::Option* threads_opt = nullptr;
};

RunConfig base_config(const Globals& g) {
  RunConfig rc = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
  if (g.threads_opt->count()) rc.threads = g.threads;
  set_thread_count(rc.threads);
  return rc;
}

void write_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// kernels ---------------------------------------------------------------

struct KernelsArgs {
  double sigma = 1.0;
  int order = 0;
  double trunc = kDefaultTruncation;
};

void cmd_kernels(const KernelsArgs& a) {
  const auto k = make_kernel(a.sigma, a.order, a.trunc);
  std::cout << "offset,weight\n";
  for (int t = -k.radius; t <= k.radius; ++t) std::cout << t << "," << format_number(k.tap(t)) << "\n";
}

// qq1d ------------------------------------------------------------------

struct Qq1dArgs {
  double s0 = 64.0;
  double gamma = 0.0;
  double C = 8.0 / 11.0;
  int order = 0;
  double s_min = 0.0;
  double s_max = 0.0;
  double ratio = std::pow(2.0, 1.0 / 16.0);
  bool discrete = false;
};

void cmd_qq1d(const Qq1dArgs& a) {
  const QuadratureParams p{a.C, a.gamma};
  p.validate();
  if (!(a.s0 > 0.0)) throw InvalidArgument("s0 must be positive");
  const double lo = a.s_min > 0.0 ? a.s_min : a.s0 / 64.0;
  const double hi = a.s_max > 0.0 ? a.s_max : a.s0 * 16.0;
  const auto grid = geometric_grid(lo, hi, a.ratio);
  std::cout << "s,Q\n";
  std::size_t best = 0;
  std::vector<double> values;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double q = a.discrete ? discrete_q_at_origin(a.order, grid[i], a.s0, p)
                                : q_at_origin(a.order, grid[i], a.s0, p);
    values.push_back(q);
    if (q > values[best]) best = i;
    std::cout << format_number(grid[i]) << "," << format_number(q) << "\n";
  }
  std::cerr << "argmax s = " << grid[best];
  try {
    std::cerr << " (closed form " << argmax_over_scale(a.order, a.s0, a.gamma) << ")";
  } catch (const InvalidArgument&) {
    std::cerr << " (no interior maximum in closed form)";
  }
  std::cerr << "\n";
}

// extract ---------------------------------------------------------------

struct ExtractArgs {
  std::string image;
  std::string out;
};

void cmd_extract(const ExtractArgs& a, const NetworkConfig& cfg, const std::string& hash) {
  const auto img = load_grey(a.image);
  const auto net = build_network(img, cfg);
  for (const auto& w : net.warnings) std::cerr << "warning: " << w << "\n";
  const fs::path root(a.out);
  fs::create_directories(root);
  json maps = json::array();
  for (const auto& inst : net.instances) {
    const std::string sdir = "sigma0_" + format_number(inst.sigma0);
    for (const auto& layer : inst.layers) {
      const fs::path dir = root / sdir / std::to_string(layer.k);
      fs::create_directories(dir);
      for (std::size_t c = 0; c < layer.channels.size(); ++c) {
        const auto& plane = layer.channels[c];
        const std::string tuple = layer.tuple(c).to_string();
        const fs::path rel = fs::path(sdir) / std::to_string(layer.k) / (tuple + ".pgm");
        save_pgm(root / rel, plane, true, 16);
        double lo = plane.values()[0], hi = lo;
        for (double v : plane.values()) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        maps.push_back({{"sigma0", inst.sigma0},
                        {"layer", layer.k},
                        {"s", layer.s},
                        {"tuple", tuple},
                        {"file", rel.generic_string()},
                        {"min", lo},
                        {"max", hi}});
      }
    }
  }
  const json manifest{{"schema_version", kSchemaVersion},
                      {"source", a.image},
                      {"width", img.width()},
                      {"height", img.height()},
                      {"network", network_to_json(cfg)},
                      {"config_hash", hash},
                      {"pgm_encoding", "16-bit, each map stretched from [min, max]"},
                      {"maps", maps}};
  write_json(manifest, (root / "manifest.json").string());
  std::cout << maps.size() << " maps written to " << root.string() << "\n";
}

// descriptor ------------------------------------------------------------

struct DescriptorArgs {
  std::string image;
  std::string out;
};

void cmd_descriptor(const DescriptorArgs& a, const RunConfig& rc) {
  BenchmarkOptions opts;
  opts.network = rc.network;
  opts.colour = rc.colour;
  opts.border = rc.border;
  const auto d = describe_file(a.image, opts);
  std::string base = a.out;
  if (base.empty()) base = fs::path(a.image).stem().string() + ".qqd";
  save_descriptor(base, d);
  std::cout << json{{"file", base},
                    {"dimension", d.values.size()},
                    {"source", a.image},
                    {"colour", colour_mode_name(rc.colour)}}
                   .dump()
            << "\n";
}

// bench -----------------------------------------------------------------

struct BenchArgs {
  std::string root;
  std::string out;
  std::string cache;
};

void cmd_bench(const BenchArgs& a, const RunConfig& rc) {
  const auto ds = ingest_dataset(a.root, rc.layout, rc.split);
  BenchmarkOptions opts;
  opts.network = rc.network;
  opts.metric = rc.metric;
  opts.colour = rc.colour;
  opts.border = rc.border;
  if (!a.cache.empty())
    opts.cache_dir = a.cache;
  else
    opts.cache_dir = rc.cache_dir;
  const auto rep = run_benchmark(ds, opts);
  if (a.out.empty()) {
    std::cout << rep.to_json().dump(2) << "\n";
    std::cerr << rep.to_table();
  } else {
    write_json(rep.to_json(), a.out);
    std::cout << rep.to_table();
  }
}

// covcheck --------------------------------------------------------------

struct CovArgs {
  std::string image;
  std::string transform = "scale";
  double S = 2.0;
  int turns = 1;
  std::string method = "bilinear";
  std::optional<double> tolerance;
  std::string out;
};

void cmd_covcheck(const CovArgs& a, const RunConfig& rc) {
  const auto img = load_grey(a.image);
  CovarianceReport rep;
  if (a.transform == "scale") {
    const auto method = a.method == "bicubic" ? ResampleMethod::Bicubic : ResampleMethod::Bilinear;
    rep = check_scale_covariance(img, a.S, rc.network, a.tolerance.value_or(rc.scale_tolerance), method);
  } else {
    rep = check_rotation_covariance(img, a.turns, rc.network, a.tolerance.value_or(rc.rotation_tolerance));
  }
  json j = rep.to_json();
  j["source"] = a.image;
  j["network"] = network_to_json(rc.network);
  j["config_hash"] = config_hash(j["network"]);
  write_json(j, a.out);
  if (!rep.pass) throw PropertyFailure("covariance check failed");
}

// synth -----------------------------------------------------------------

struct SynthArgs {
  std::string root;
  std::size_t per_class = 10;
  std::size_t size = 64;
  std::uint64_t seed = 1;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi quadrature feature network: kernels, scale analysis, features, benchmarks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "run configuration (JSON)")->check(CLI::ExistingFile);
  g.threads_opt = app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

  KernelsArgs ka;
  auto* kernels = app.add_subcommand("kernels", "print sampled Gaussian derivative kernel taps (CSV)");
  kernels->add_option("--sigma", ka.sigma, "standard deviation in pixels")->required();
  kernels->add_option("--order", ka.order, "derivative order")->check(CLI::Range(0, 2));
  kernels->add_option("--trunc", ka.trunc, "truncation radius in sigmas");

  Qq1dArgs qa;
  auto* qq1d = app.add_subcommand("qq1d", "scale response of Q at the origin for Gaussian input (CSV)");
  qq1d->add_option("--s0", qa.s0, "variance of the input blob");
  qq1d->add_option("--gamma", qa.gamma, "Gamma");
  qq1d->add_option("--C", qa.C, "second-order weight");
  qq1d->add_option("--order", qa.order, "input derivative order")->check(CLI::Range(0, 2));
  qq1d->add_option("--s-min", qa.s_min, "smallest scale (default s0/64)");
  qq1d->add_option("--s-max", qa.s_max, "largest scale (default 16 s0)");
  qq1d->add_option("--ratio", qa.ratio, "grid ratio (default 2^(1/16))");
  qq1d->add_flag("--discrete", qa.discrete, "evaluate with sampled kernels instead of closed form");

  ExtractArgs ea;
  NetworkFlags extract_net;
  auto* extract = app.add_subcommand("extract", "dump every feature map as PGM with a JSON manifest");
  extract->add_option("image", ea.image)->required();
  extract->add_option("--out", ea.out, "output directory")->required();
  extract_net.add(extract);

  DescriptorArgs da;
  NetworkFlags desc_net;
  std::string desc_colour, desc_border;
  auto* descriptor = app.add_subcommand("descriptor", "compute the mean-reduced descriptor (.qqd)");
  descriptor->add_option("image", da.image)->required();
  descriptor->add_option("--out", da.out, "output base path (default <stem>.qqd)");
  descriptor->add_option("--colour", desc_colour, "grey or luv");
  descriptor->add_option("--border", desc_border, "interior or full");
  desc_net.add(descriptor);

  BenchArgs ba;
  NetworkFlags bench_net;
  std::string bench_layout, bench_split, bench_metric, bench_colour, bench_border;
  std::uint64_t bench_seed = 0;
  auto* bench = app.add_subcommand("bench", "nearest-neighbour texture benchmark");
  bench->add_option("root", ba.root, "dataset root")->required();
  bench->add_option("--layout", bench_layout, "kthtips2b or flat_dirs");
  bench->add_option("--split", bench_split, "sample_held_out, scale_split, random or leave_one_out");
  auto* seed_opt = bench->add_option("--seed", bench_seed, "seed of the random split");
  bench->add_option("--metric", bench_metric, "euclidean or euclidean_standardized");
  bench->add_option("--colour", bench_colour, "grey or luv");
  bench->add_option("--border", bench_border, "interior or full")->check(CLI::IsMember({"interior", "full"}));
  bench->add_option("--out", ba.out, "report JSON path (default stdout)");
  bench->add_option("--cache", ba.cache, "descriptor cache directory");
  bench_net.add(bench);

  CovArgs ca;
  NetworkFlags cov_net;
  double cov_tol = 0.0;
  auto* covcheck = app.add_subcommand("covcheck", "empirical scale or rotation covariance check");
  covcheck->add_option("image", ca.image)->required();
  covcheck->add_option("--transform", ca.transform)->check(CLI::IsMember({"scale", "rotation"}));
  covcheck->add_option("--S", ca.S, "scale factor (downsampled copy is 1/S)");
  covcheck->add_option("--turns", ca.turns, "quarter turns");
  covcheck->add_option("--method", ca.method)->check(CLI::IsMember({"bilinear", "bicubic"}));
  auto* tol_opt = covcheck->add_option("--tolerance", cov_tol, "pass threshold on mean relative deviation");
  covcheck->add_option("--out", ca.out, "report JSON path (default stdout)");
  cov_net.add(covcheck);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "write the synthetic grating/noise corpus (flat_dirs)");
  synth->add_option("root", sa.root)->required();
  synth->add_option("--per-class", sa.per_class);
  synth->add_option("--size", sa.size);
  synth->add_option("--seed", sa.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*kernels) {
      cmd_kernels(ka);
    } else if (*qq1d) {
      cmd_qq1d(qa);
    } else if (*synth) {
      write_synthetic_corpus(sa.root, sa.per_class, sa.size, sa.seed);
      std::cout << "synthetic corpus written to " << sa.root << "\n";
    } else {
      RunConfig rc = base_config(g);
      if (*extract) {
        extract_net.apply(rc.network);
        rc.validate();
        cmd_extract(ea, rc.network, config_hash(network_to_json(rc.network)));
      } else if (*descriptor) {
        desc_net.apply(rc.network);
        if (!desc_colour.empty()) rc.colour = parse_colour_mode(desc_colour);
        if (desc_border == "full") rc.border = BorderPolicy::Full;
        else if (desc_border == "interior") rc.border = BorderPolicy::Interior;
        else if (!desc_border.empty()) throw InvalidArgument("--border must be interior or full");
        rc.validate();
        cmd_descriptor(da, rc);
      } else if (*bench) {
        bench_net.apply(rc.network);
        if (!bench_layout.empty()) rc.layout = parse_layout(bench_layout);
        if (!bench_split.empty()) rc.split.kind = parse_split(bench_split);
        if (seed_opt->count()) rc.split.seed = bench_seed;
        if (!bench_metric.empty()) rc.metric = parse_metric(bench_metric);
        if (!bench_colour.empty()) rc.colour = parse_colour_mode(bench_colour);
        if (!bench_border.empty())
          rc.border = bench_border == "full" ? BorderPolicy::Full : BorderPolicy::Interior;
        rc.validate();
        cmd_bench(ba, rc);
      } else if (*covcheck) {
        if (g.config_path.empty()) rc.network.sigma0_list = {2.0, 4.0};
        cov_net.apply(rc.network);
        if (tol_opt->count()) ca.tolerance = cov_tol;
        rc.validate();
        cmd_covcheck(ca, rc);
      }
    }
  } catch (const PropertyFailure& e) {
    std::cerr << "property check failed: " << e.what() << "\n";
    return kProperty;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
