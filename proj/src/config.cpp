#include "offprof/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace offprof {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("config: '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::vector<std::string> as_string_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("config: '" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const json& item : v) {
    if (!item.is_string()) throw ConfigError("config: '" + key + "' must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

void merge_rrc(RrcModelParams& p, const json& obj) {
  for (const auto& [key, value] : obj.items()) {
    if (key == "p_dch_mw") p.p_dch_mw = as_double(value, "rrc." + key);
    else if (key == "p_fach_mw") p.p_fach_mw = as_double(value, "rrc." + key);
    else if (key == "p_idle_mw") p.p_idle_mw = as_double(value, "rrc." + key);
    else if (key == "t_dch_us") p.t_dch_us = as_int(value, "rrc." + key);
    else if (key == "t_fach_us") p.t_fach_us = as_int(value, "rrc." + key);
    else if (key == "per_byte_tx_uj") p.per_byte_tx_uj = as_double(value, "rrc." + key);
    else if (key == "per_byte_rx_uj") p.per_byte_rx_uj = as_double(value, "rrc." + key);
    else throw ConfigError("config: unknown key 'rrc." + key + "'");
  }
}

void merge_wifi(WifiModelParams& p, const json& obj) {
  for (const auto& [key, value] : obj.items()) {
    if (key == "p_active_mw") p.p_active_mw = as_double(value, "wifi." + key);
    else if (key == "t_tail_us") p.t_tail_us = as_int(value, "wifi." + key);
    else if (key == "p_idle_mw") p.p_idle_mw = as_double(value, "wifi." + key);
    else if (key == "per_byte_tx_uj") p.per_byte_tx_uj = as_double(value, "wifi." + key);
    else if (key == "per_byte_rx_uj") p.per_byte_rx_uj = as_double(value, "wifi." + key);
    else throw ConfigError("config: unknown key 'wifi." + key + "'");
  }
}

void merge_correlation(RunConfig& c, const json& obj) {
  for (const auto& [key, value] : obj.items()) {
    if (key == "bin_width_us") c.bin_width_us = as_int(value, "correlation." + key);
    else if (key == "max_lag_bins") c.max_lag_bins = static_cast<int>(as_int(value, "correlation." + key));
    else if (key == "threshold") c.threshold = as_double(value, "correlation." + key);
    else throw ConfigError("config: unknown key 'correlation." + key + "'");
  }
}

}  // namespace

EnergyModel RunConfig::energy_model() const {
  if (model == "3g") return rrc;
  if (model == "wifi") return wifi;
  throw ConfigError("config: model must be '3g' or 'wifi', got '" + model + "'");
}

std::vector<std::string> RunConfig::subsystem_catalog() const {
  std::vector<std::string> all = constrained_subsystems;
  all.insert(all.end(), filesystem_subsystems.begin(), filesystem_subsystems.end());
  all.insert(all.end(), neutral_subsystems.begin(), neutral_subsystems.end());
  return all;
}

void RunConfig::validate() const {
  if (model != "3g" && model != "wifi") {
    throw ConfigError("config: model must be '3g' or 'wifi', got '" + model + "'");
  }
  rrc.validate();
  wifi.validate();
  if (bin_width_us <= 0) throw ConfigError("config: correlation.bin_width_us must be positive");
  if (max_lag_bins < 0) throw ConfigError("config: correlation.max_lag_bins must be non-negative");
  if (threshold <= 0.0 || threshold > 1.0) {
    throw ConfigError("config: correlation.threshold must be in (0, 1]");
  }
  if (idle_gap_us <= 0) throw ConfigError("config: idle_gap_us must be positive");
  if (network_call_prefixes.empty()) {
    throw ConfigError("config: network_call_prefixes must not be empty");
  }
  for (const auto* list : {&network_call_prefixes, &collapse_prefixes}) {
    for (const std::string& p : *list) {
      if (p.empty()) throw ConfigError("config: prefixes must not be empty strings");
    }
  }
  for (const auto* list :
       {&constrained_subsystems, &filesystem_subsystems, &neutral_subsystems, &always_serializable}) {
    for (const std::string& s : *list) {
      if (s.empty()) throw ConfigError("config: list entries must not be empty strings");
    }
  }
}

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");

  RunConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "model") {
      if (!value.is_string()) throw ConfigError("config: 'model' must be a string");
      c.model = value.get<std::string>();
    } else if (key == "rrc") {
      if (!value.is_object()) throw ConfigError("config: 'rrc' must be an object");
      merge_rrc(c.rrc, value);
    } else if (key == "wifi") {
      if (!value.is_object()) throw ConfigError("config: 'wifi' must be an object");
      merge_wifi(c.wifi, value);
    } else if (key == "correlation") {
      if (!value.is_object()) throw ConfigError("config: 'correlation' must be an object");
      merge_correlation(c, value);
    } else if (key == "idle_gap_us") {
      c.idle_gap_us = as_int(value, key);
    } else if (key == "network_call_prefixes") {
      c.network_call_prefixes = as_string_list(value, key);
    } else if (key == "collapse_prefixes") {
      c.collapse_prefixes = as_string_list(value, key);
    } else if (key == "min_bytes_filter") {
      std::int64_t v = as_int(value, key);
      if (v < 0) throw ConfigError("config: 'min_bytes_filter' must be non-negative");
      c.min_bytes_filter = static_cast<std::uint64_t>(v);
    } else if (key == "constrained_subsystems") {
      c.constrained_subsystems = as_string_list(value, key);
    } else if (key == "filesystem_subsystems") {
      c.filesystem_subsystems = as_string_list(value, key);
    } else if (key == "neutral_subsystems") {
      c.neutral_subsystems = as_string_list(value, key);
    } else if (key == "always_serializable") {
      c.always_serializable = as_string_list(value, key);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const RunConfig& config) {
  ordered_json doc;
  doc["model"] = config.model;
  doc["rrc"] = ordered_json{{"p_dch_mw", config.rrc.p_dch_mw},
                            {"p_fach_mw", config.rrc.p_fach_mw},
                            {"p_idle_mw", config.rrc.p_idle_mw},
                            {"t_dch_us", config.rrc.t_dch_us},
                            {"t_fach_us", config.rrc.t_fach_us},
                            {"per_byte_tx_uj", config.rrc.per_byte_tx_uj},
                            {"per_byte_rx_uj", config.rrc.per_byte_rx_uj}};
  doc["wifi"] = ordered_json{{"p_active_mw", config.wifi.p_active_mw},
                             {"t_tail_us", config.wifi.t_tail_us},
                             {"p_idle_mw", config.wifi.p_idle_mw},
                             {"per_byte_tx_uj", config.wifi.per_byte_tx_uj},
                             {"per_byte_rx_uj", config.wifi.per_byte_rx_uj}};
  doc["correlation"] = ordered_json{{"bin_width_us", config.bin_width_us},
                                    {"max_lag_bins", config.max_lag_bins},
                                    {"threshold", config.threshold}};
  doc["idle_gap_us"] = config.idle_gap_us;
  doc["network_call_prefixes"] = config.network_call_prefixes;
  doc["collapse_prefixes"] = config.collapse_prefixes;
  doc["min_bytes_filter"] = config.min_bytes_filter;
  doc["constrained_subsystems"] = config.constrained_subsystems;
  doc["filesystem_subsystems"] = config.filesystem_subsystems;
  doc["neutral_subsystems"] = config.neutral_subsystems;
  doc["always_serializable"] = config.always_serializable;
  return doc.dump(2) + "\n";
}

}  // namespace offprof
