#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qqnet/config.hpp"
#include "qqnet/dataset.hpp"

namespace qqnet {

struct BenchmarkOptions {
  NetworkConfig network;
  Metric metric = Metric::EuclideanStandardized;
  ColourMode colour = ColourMode::Grey;
  BorderPolicy border = BorderPolicy::Interior;
  /// Descriptors are stored here and reloaded on later runs when present.
  std::optional<std::filesystem::path> cache_dir;
};

struct FoldResult {
  std::string name;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

struct BenchmarkReport {
  std::vector<std::string> classes;
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over folds
  /// confusion[true][predicted], summed over folds.
  std::vector<std::vector<std::size_t>> confusion;
  std::string split;
  std::string metric;
  std::string config_hash;
  json config;

  json to_json() const;
  std::string to_table() const;
};

/// Descriptor for one image file under the benchmark's colour mode.
Descriptor describe_file(const std::filesystem::path& path, const BenchmarkOptions& options);

/// Computes every item's descriptor once, then classifies each fold's test
/// items against its training items. Deterministic for a given dataset and
/// options.
BenchmarkReport run_benchmark(const LabeledDataset& ds, const BenchmarkOptions& options);

/// Writes a three-class flat_dirs corpus of size x size PGM images:
/// gratings at 0 and 45 degrees with random phase and period, and uniform
/// white noise.
void write_synthetic_corpus(const std::filesystem::path& root, std::size_t per_class,
                            std::size_t size, std::uint64_t seed);

}  // namespace qqnet
