#include "qqnet/dataset.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <regex>
#include <set>

#include "qqnet/image.hpp"

namespace qqnet {

namespace fs = std::filesystem;

DatasetLayout parse_layout(std::string_view name) {
  if (name == "kthtips2b") return DatasetLayout::KthTips2b;
  if (name == "flat_dirs") return DatasetLayout::FlatDirs;
  throw InvalidArgument("unknown dataset layout '" + std::string(name) +
                        "' (expected kthtips2b or flat_dirs)");
}

SplitKind parse_split(std::string_view name) {
  if (name == "sample_held_out") return SplitKind::SampleHeldOut;
  if (name == "scale_split") return SplitKind::ScaleSplit;
  if (name == "random") return SplitKind::Random;
  if (name == "leave_one_out") return SplitKind::LeaveOneOut;
  throw InvalidArgument("unknown split '" + std::string(name) + "'");
}

std::string_view split_name(SplitKind kind) {
  switch (kind) {
    case SplitKind::SampleHeldOut: return "sample_held_out";
    case SplitKind::ScaleSplit: return "scale_split";
    case SplitKind::Random: return "random";
    case SplitKind::LeaveOneOut: return "leave_one_out";
  }
  return "unknown";
}

namespace {

bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm" || ext == ".ppm";
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void scan_kthtips2b(const fs::path& class_dir, const std::string& label,
                    std::vector<DatasetItem>& items) {
  static const std::regex name_re(R"(^(\d+)([a-z])-scale_(\d+)_im_(\d+)_([A-Za-z0-9]+)$)");
  std::size_t found = 0;
  for (const auto& sample_dir : sorted_entries(class_dir)) {
    if (!fs::is_directory(sample_dir)) continue;
    const auto dname = sample_dir.filename().string();
    if (dname.rfind("sample_", 0) != 0 || dname.size() != 8) {
      throw DataError("malformed kthtips2b tree: unexpected directory " + sample_dir.string());
    }
    const std::string sample = dname.substr(7);
    for (const auto& file : sorted_entries(sample_dir)) {
      if (!fs::is_regular_file(file) || !is_image_file(file)) continue;
      std::smatch m;
      const std::string stem = file.stem().string();
      if (!std::regex_match(stem, m, name_re)) {
        throw DataError("malformed kthtips2b file name: " + file.string());
      }
      if (m[2].str() != sample) {
        throw DataError("sample letter does not match its directory: " + file.string());
      }
      items.push_back({file, label, sample, std::stoi(m[3].str()), std::stoi(m[4].str())});
      ++found;
    }
  }
  if (found == 0) throw DataError("empty class: " + class_dir.string());
}

void scan_flat(const fs::path& class_dir, const std::string& label,
               std::vector<DatasetItem>& items) {
  std::size_t found = 0;
  for (const auto& file : sorted_entries(class_dir)) {
    if (!fs::is_regular_file(file) || !is_image_file(file)) continue;
    items.push_back({file, label, file.stem().string(), 0, 0});
    ++found;
  }
  if (found == 0) throw DataError("empty class: " + class_dir.string());
}

void check_training_coverage(const std::vector<DatasetItem>& items, const Fold& fold) {
  std::set<std::string> all, trained;
  for (const auto& it : items) all.insert(it.label);
  for (auto i : fold.train) trained.insert(items[i].label);
  for (const auto& c : all) {
    if (!trained.count(c)) {
      throw DataError("split fold '" + fold.name + "' leaves class '" + c +
                      "' without training items");
    }
  }
}

}  // namespace

std::vector<Fold> make_folds(const std::vector<DatasetItem>& items, const SplitSpec& split) {
  std::vector<Fold> folds;
  switch (split.kind) {
    case SplitKind::SampleHeldOut: {
      std::set<std::string> samples;
      for (const auto& it : items) samples.insert(it.sample);
      for (const auto& held : samples) {
        Fold f;
        f.name = "held_out_" + held;
        for (std::size_t i = 0; i < items.size(); ++i)
          (items[i].sample == held ? f.test : f.train).push_back(i);
        folds.push_back(std::move(f));
      }
      break;
    }
    case SplitKind::ScaleSplit: {
      Fold f;
      f.name = "scales_even_train";
      for (std::size_t i = 0; i < items.size(); ++i) {
        const int s = items[i].scale;
        if (s < 2 || s > 10) throw DataError("scale split needs scale tags 2..10: " + items[i].path.string());
        (s % 2 == 0 ? f.train : f.test).push_back(i);
      }
      folds.push_back(std::move(f));
      break;
    }
    case SplitKind::Random: {
      std::map<std::string, std::vector<std::size_t>> by_class;
      for (std::size_t i = 0; i < items.size(); ++i) by_class[items[i].label].push_back(i);
      std::mt19937_64 rng(split.seed);
      Fold f;
      f.name = "random_" + std::to_string(split.seed);
      for (auto& [label, idx] : by_class) {
        // Fisher-Yates with an explicit draw so the shuffle is identical
        // across standard library implementations.
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
        const std::size_t ntrain = (idx.size() + 1) / 2;
        for (std::size_t j = 0; j < idx.size(); ++j) (j < ntrain ? f.train : f.test).push_back(idx[j]);
      }
      std::sort(f.train.begin(), f.train.end());
      std::sort(f.test.begin(), f.test.end());
      folds.push_back(std::move(f));
      break;
    }
    case SplitKind::LeaveOneOut: {
      for (std::size_t i = 0; i < items.size(); ++i) {
        Fold f;
        f.name = "loo_" + std::to_string(i);
        f.test.push_back(i);
        for (std::size_t j = 0; j < items.size(); ++j)
          if (j != i) f.train.push_back(j);
        folds.push_back(std::move(f));
      }
      break;
    }
  }
  for (const auto& f : folds) check_training_coverage(items, f);
  return folds;
}

LabeledDataset ingest_dataset(const fs::path& root, DatasetLayout layout, const SplitSpec& split) {
  if (!fs::is_directory(root)) throw DataError("dataset root is not a directory: " + root.string());
  LabeledDataset ds;
  ds.split = split;
  for (const auto& class_dir : sorted_entries(root)) {
    if (!fs::is_directory(class_dir)) continue;
    const std::string label = class_dir.filename().string();
    if (layout == DatasetLayout::KthTips2b)
      scan_kthtips2b(class_dir, label, ds.items);
    else
      scan_flat(class_dir, label, ds.items);
    ds.classes.push_back(label);
  }
  if (ds.classes.empty()) throw DataError("malformed dataset tree: no class directories in " + root.string());
  ds.folds = make_folds(ds.items, split);
  return ds;
}

}  // namespace qqnet
