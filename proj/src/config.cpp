#include "qqnet/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace qqnet {

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known, std::string_view where) {
  if (!j.is_object()) throw InvalidArgument(std::string(where) + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw InvalidArgument(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

json network_to_json(const NetworkConfig& cfg) {
  return json{{"M", cfg.M},
              {"K", cfg.K},
              {"num_layers", cfg.num_layers},
              {"r", cfg.r},
              {"sigma0_list", cfg.sigma0_list},
              {"C", cfg.qparams.C},
              {"Gamma", cfg.qparams.Gamma},
              {"post_smoothing", cfg.post_smoothing},
              {"trunc_mult", cfg.trunc_mult}};
}

NetworkConfig network_from_json(const json& j, NetworkConfig base) {
  reject_unknown_keys(j,
                      {"M", "K", "num_layers", "r", "sigma0_list", "C", "Gamma", "post_smoothing",
                       "trunc_mult"},
                      "network");
  read_if(j, "M", base.M);
  read_if(j, "K", base.K);
  read_if(j, "num_layers", base.num_layers);
  read_if(j, "r", base.r);
  read_if(j, "sigma0_list", base.sigma0_list);
  read_if(j, "C", base.qparams.C);
  read_if(j, "Gamma", base.qparams.Gamma);
  read_if(j, "post_smoothing", base.post_smoothing);
  read_if(j, "trunc_mult", base.trunc_mult);
  return base;
}

std::string config_hash(const json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ColourMode parse_colour_mode(std::string_view name) {
  if (name == "grey") return ColourMode::Grey;
  if (name == "luv") return ColourMode::Luv;
  throw InvalidArgument("unknown colour mode '" + std::string(name) + "' (expected grey or luv)");
}

std::string_view colour_mode_name(ColourMode m) { return m == ColourMode::Grey ? "grey" : "luv"; }

void RunConfig::validate() const {
  network.validate();
  if (!(scale_tolerance > 0.0)) throw InvalidArgument("scale tolerance must be positive");
  if (!(rotation_tolerance > 0.0)) throw InvalidArgument("rotation tolerance must be positive");
}

json run_config_to_json(const RunConfig& rc) {
  json j{{"schema_version", kSchemaVersion},
         {"network", network_to_json(rc.network)},
         {"metric", metric_name(rc.metric)},
         {"split", {{"kind", split_name(rc.split.kind)}, {"seed", rc.split.seed}}},
         {"layout", rc.layout == DatasetLayout::KthTips2b ? "kthtips2b" : "flat_dirs"},
         {"colour", colour_mode_name(rc.colour)},
         {"border", rc.border == BorderPolicy::Interior ? "interior" : "full"},
         {"seed", rc.seed},
         {"threads", rc.threads},
         {"scale_tolerance", rc.scale_tolerance},
         {"rotation_tolerance", rc.rotation_tolerance}};
  if (rc.cache_dir) j["cache_dir"] = rc.cache_dir->string();
  return j;
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"schema_version", "network", "metric", "split", "layout", "colour", "border",
                       "seed", "threads", "scale_tolerance", "rotation_tolerance", "cache_dir"},
                      "config");
  RunConfig rc;
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion) {
    throw InvalidArgument("unsupported config schema_version");
  }
  if (j.contains("network")) rc.network = network_from_json(j.at("network"));
  std::string text;
  if (j.contains("metric")) {
    read_if(j, "metric", text);
    rc.metric = parse_metric(text);
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    reject_unknown_keys(s, {"kind", "seed"}, "split");
    if (s.contains("kind")) {
      read_if(s, "kind", text);
      rc.split.kind = parse_split(text);
    }
    read_if(s, "seed", rc.split.seed);
  }
  if (j.contains("layout")) {
    read_if(j, "layout", text);
    rc.layout = parse_layout(text);
  }
  if (j.contains("colour")) {
    read_if(j, "colour", text);
    rc.colour = parse_colour_mode(text);
  }
  if (j.contains("border")) {
    read_if(j, "border", text);
    if (text == "interior")
      rc.border = BorderPolicy::Interior;
    else if (text == "full")
      rc.border = BorderPolicy::Full;
    else
      throw InvalidArgument("border must be interior or full");
  }
  read_if(j, "seed", rc.seed);
  read_if(j, "threads", rc.threads);
  read_if(j, "scale_tolerance", rc.scale_tolerance);
  read_if(j, "rotation_tolerance", rc.rotation_tolerance);
  if (j.contains("cache_dir")) {
    read_if(j, "cache_dir", text);
    rc.cache_dir = text;
  }
  rc.validate();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace qqnet
