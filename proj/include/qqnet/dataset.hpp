#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qqnet {

enum class DatasetLayout {
  KthTips2b,  // <class>/sample_<x>/<n><x>-scale_<s>_im_<i>_<tag>.<ext>
  FlatDirs,   // <class>/<image>.<ext>
};

DatasetLayout parse_layout(std::string_view name);

struct DatasetItem {
  std::filesystem::path path;
  std::string label;
  std::string sample;  // sample letter for kthtips2b, file stem otherwise
  int scale = 0;       // 0 when the layout carries no scale
  int condition = 0;
};

enum class SplitKind {
  SampleHeldOut,  // one fold per sample; that sample is the test set
  ScaleSplit,     // train on scales {2,4,6,8,10}, test on {3,5,7,9}
  Random,         // 50/50 per class with a seed
  LeaveOneOut,    // every item is a test fold once
};

struct SplitSpec {
  SplitKind kind = SplitKind::SampleHeldOut;
  std::uint64_t seed = 0;
};

SplitKind parse_split(std::string_view name);
std::string_view split_name(SplitKind kind);

struct Fold {
  std::string name;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct LabeledDataset {
  std::vector<DatasetItem> items;
  std::vector<std::string> classes;  // sorted
  SplitSpec split;
  std::vector<Fold> folds;
};

/// Scans `root` (directory and file order are sorted, so ingestion is
/// deterministic) and builds the folds of `split`. Throws DataError for a
/// malformed tree, an empty class, or a fold that leaves a class without
/// training items.
LabeledDataset ingest_dataset(const std::filesystem::path& root, DatasetLayout layout,
                              const SplitSpec& split);

/// Folds for an already-scanned item list.
std::vector<Fold> make_folds(const std::vector<DatasetItem>& items, const SplitSpec& split);

}  // namespace qqnet
