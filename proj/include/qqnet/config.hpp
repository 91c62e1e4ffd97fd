#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "qqnet/cascade.hpp"
#include "qqnet/dataset.hpp"
#include "qqnet/descriptor.hpp"
#include "qqnet/nnc.hpp"

namespace qqnet {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json network_to_json(const NetworkConfig& cfg);
/// Fields missing from `j` keep the values of `base`. Unknown keys are errors.
NetworkConfig network_from_json(const json& j, NetworkConfig base = {});

/// FNV-1a 64 over the canonical (sorted-key, compact) JSON text, as hex.
std::string config_hash(const json& j);

enum class ColourMode { Grey, Luv };
ColourMode parse_colour_mode(std::string_view name);
std::string_view colour_mode_name(ColourMode m);

/// Everything one CLI run needs; read from a single JSON file, then
/// individual fields may be overridden by flags.
struct RunConfig {
  NetworkConfig network;
  Metric metric = Metric::EuclideanStandardized;
  SplitSpec split;
  DatasetLayout layout = DatasetLayout::KthTips2b;
  ColourMode colour = ColourMode::Grey;
  BorderPolicy border = BorderPolicy::Interior;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double scale_tolerance = 0.05;
  double rotation_tolerance = 1e-9;
  std::optional<std::filesystem::path> cache_dir;

  void validate() const;
};

json run_config_to_json(const RunConfig& rc);
RunConfig run_config_from_json(const json& j);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace qqnet
