#include "qqnet/benchmark.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "qqnet/image_io.hpp"
#include "qqnet/nnc.hpp"
#include "qqnet/parallel.hpp"

namespace qqnet {

namespace fs = std::filesystem;

namespace {

json benchmark_config_json(const BenchmarkOptions& o, const LabeledDataset& ds) {
  return json{{"network", network_to_json(o.network)},
              {"metric", metric_name(o.metric)},
              {"colour", colour_mode_name(o.colour)},
              {"border", o.border == BorderPolicy::Interior ? "interior" : "full"},
              {"split", {{"kind", split_name(ds.split.kind)}, {"seed", ds.split.seed}}}};
}

fs::path cache_path(const fs::path& dir, const fs::path& image, const std::string& cfg_hash) {
  const std::string key = config_hash(json(image.lexically_normal().string()));
  return dir / (key + "_" + cfg_hash + ".qqd");
}

}  // namespace

Descriptor describe_file(const fs::path& path, const BenchmarkOptions& options) {
  const DescriptorOptions dopts{options.border};
  auto img = load_image(path);
  if (options.colour == ColourMode::Grey) {
    if (auto* colour = std::get_if<ColourImage>(&img)) {
      return compute_descriptor(to_grey(*colour), options.network, dopts, path.string());
    }
    return compute_descriptor(std::get<ImagePlane>(img), options.network, dopts, path.string());
  }
  auto* colour = std::get_if<ColourImage>(&img);
  if (!colour) throw DataError("LUV descriptor needs a colour image: " + path.string());
  return compute_descriptor(*colour, options.network, dopts, path.string());
}

BenchmarkReport run_benchmark(const LabeledDataset& ds, const BenchmarkOptions& options) {
  options.network.validate();
  if (ds.classes.size() < 2) throw DataError("need >= 2 classes for a benchmark");

  BenchmarkReport rep;
  rep.classes = ds.classes;
  rep.split = std::string(split_name(ds.split.kind));
  rep.metric = std::string(metric_name(options.metric));
  rep.config = benchmark_config_json(options, ds);
  rep.config_hash = config_hash(rep.config);

  const json desc_cfg{{"network", network_to_json(options.network)},
                      {"colour", colour_mode_name(options.colour)},
                      {"border", options.border == BorderPolicy::Interior ? "interior" : "full"}};
  const std::string desc_hash = config_hash(desc_cfg);
  if (options.cache_dir) fs::create_directories(*options.cache_dir);

  std::vector<std::vector<double>> features(ds.items.size());
  parallel_for(ds.items.size(), [&](std::size_t i) {
    const auto& item = ds.items[i];
    if (options.cache_dir) {
      const auto cached = cache_path(*options.cache_dir, item.path, desc_hash);
      if (fs::exists(cached)) {
        features[i] = load_descriptor(cached).values;
        return;
      }
      Descriptor d = describe_file(item.path, options);
      save_descriptor(cached, d);
      features[i] = std::move(d.values);
      return;
    }
    features[i] = describe_file(item.path, options).values;
  });

  std::map<std::string, std::size_t> class_index;
  for (std::size_t c = 0; c < ds.classes.size(); ++c) class_index[ds.classes[c]] = c;
  rep.confusion.assign(ds.classes.size(), std::vector<std::size_t>(ds.classes.size(), 0));

  for (const auto& fold : ds.folds) {
    std::vector<std::vector<double>> train;
    std::vector<std::string> labels;
    for (auto i : fold.train) {
      train.push_back(features[i]);
      labels.push_back(ds.items[i].label);
    }
    const NearestNeighbour nn(std::move(train), std::move(labels), options.metric);
    FoldResult fr;
    fr.name = fold.name;
    for (auto i : fold.test) {
      const std::string& predicted = nn.classify(features[i]);
      const bool ok = predicted == ds.items[i].label;
      fr.correct += ok ? 1 : 0;
      ++fr.total;
      ++rep.confusion[class_index.at(ds.items[i].label)][class_index.at(predicted)];
    }
    rep.folds.push_back(fr);
  }

  // Leave-one-out folds hold a single item each; report their pooled rate.
  double sum = 0.0, sum2 = 0.0;
  for (const auto& f : rep.folds) {
    sum += f.accuracy();
    sum2 += f.accuracy() * f.accuracy();
  }
  const auto n = static_cast<double>(rep.folds.size());
  if (ds.split.kind == SplitKind::LeaveOneOut) {
    std::size_t correct = 0, total = 0;
    for (const auto& f : rep.folds) {
      correct += f.correct;
      total += f.total;
    }
    rep.mean_accuracy = static_cast<double>(correct) / static_cast<double>(total);
    rep.std_accuracy = 0.0;
  } else {
    rep.mean_accuracy = sum / n;
    rep.std_accuracy = std::sqrt(std::max(0.0, sum2 / n - rep.mean_accuracy * rep.mean_accuracy));
  }
  return rep;
}

json BenchmarkReport::to_json() const {
  json folds_json = json::array();
  for (const auto& f : folds) {
    folds_json.push_back({{"name", f.name}, {"correct", f.correct}, {"total", f.total},
                          {"accuracy", f.accuracy()}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"split", split},
              {"metric", metric},
              {"classes", classes},
              {"folds", folds_json},
              {"mean_accuracy", mean_accuracy},
              {"std_accuracy", std_accuracy},
              {"confusion", confusion},
              {"config", config},
              {"config_hash", config_hash}};
}

std::string BenchmarkReport::to_table() const {
  std::ostringstream os;
  os << "split " << split << ", metric " << metric << ", config " << config_hash << "\n";
  if (split != "leave_one_out") {
    for (const auto& f : folds) {
      os << "  " << std::left << std::setw(24) << f.name << std::right << std::setw(6) << f.correct
         << " / " << std::setw(6) << f.total << "  " << std::fixed << std::setprecision(4)
         << f.accuracy() << "\n";
    }
  }
  os << "mean accuracy " << std::fixed << std::setprecision(4) << mean_accuracy << " (std "
     << std_accuracy << ", " << folds.size() << " folds)\n";
  os << "confusion (rows true, columns predicted):\n";
  for (std::size_t r = 0; r < classes.size(); ++r) {
    os << "  " << std::left << std::setw(24) << classes[r] << std::right;
    for (auto v : confusion[r]) os << std::setw(6) << v;
    os << "\n";
  }
  return os.str();
}

void write_synthetic_corpus(const fs::path& root, std::size_t per_class, std::size_t size,
                            std::uint64_t seed) {
  if (per_class == 0 || size < 8) throw InvalidArgument("synthetic corpus needs items and size >= 8");
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  const struct {
    const char* name;
    double angle_deg;  // negative: noise
  } classes[] = {{"grating_000", 0.0}, {"grating_045", 45.0}, {"noise", -1.0}};

  for (const auto& c : classes) {
    const fs::path dir = root / c.name;
    fs::create_directories(dir);
    for (std::size_t n = 0; n < per_class; ++n) {
      ImagePlane img(size, size);
      if (c.angle_deg < 0.0) {
        for (auto& v : img.values()) v = uniform(0.0, 1.0);
      } else {
        const double theta = c.angle_deg * std::numbers::pi / 180.0;
        const double period = uniform(6.0, 10.0);
        const double omega = 2.0 * std::numbers::pi / period;
        const double phase = uniform(0.0, 2.0 * std::numbers::pi);
        for (std::size_t y = 0; y < size; ++y) {
          for (std::size_t x = 0; x < size; ++x) {
            const double u = std::cos(theta) * static_cast<double>(x) +
                             std::sin(theta) * static_cast<double>(y);
            img(x, y) = 0.5 + 0.4 * std::sin(omega * u + phase) + uniform(-0.05, 0.05);
          }
        }
      }
      std::ostringstream name;
      name << c.name << "_" << std::setw(3) << std::setfill('0') << n << ".pgm";
      save_pgm(dir / name.str(), img);
    }
  }
}

}  // namespace qqnet
