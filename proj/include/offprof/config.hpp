#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "offprof/energy.hpp"
#include "offprof/errors.hpp"

namespace offprof {

// Every tunable in one place. Defaults are the documented per-module
// defaults; parse_config overlays a JSON document on top of them, so a
// config file only needs the keys it changes.
struct RunConfig {
  std::string model = "3g";  // 3g | wifi
  RrcModelParams rrc;
  WifiModelParams wifi;

  std::int64_t bin_width_us = 100'000;
  int max_lag_bins = 2;
  double threshold = 0.3;

  std::int64_t idle_gap_us = 60'000'000;

  std::vector<std::string> network_call_prefixes = {
      "java.net.", "javax.net.", "org.apache.http.", "android.net.", "libcore.io.",
  };
  std::vector<std::string> collapse_prefixes;  // empty: collapsing off

  std::uint64_t min_bytes_filter = 1;

  std::vector<std::string> constrained_subsystems = {
      "ui.notification", "ui.display",  "ui.toast",     "ui.window",      "ui.input",
      "hw.vibrate",      "hw.bluetooth", "hw.wifi",      "hw.usb",         "hw.camera",
      "hw.location",     "hw.audio",     "hw.microphone", "hw.sensor",      "hw.telephony",
      "hw.sms",          "hw.nfc",       "hw.fingerprint", "hw.battery",     "hw.flashlight",
  };
  std::vector<std::string> filesystem_subsystems = {"fs.shared_preferences", "fs.file"};
  // Recognized but unconstrained tags, so facts may record e.g. network APIs.
  std::vector<std::string> neutral_subsystems = {"net.http", "net.socket", "net.dns"};

  std::vector<std::string> always_serializable = {
      "java.lang.String",  "java.lang.Boolean", "java.lang.Byte",     "java.lang.Character",
      "java.lang.Short",   "java.lang.Integer", "java.lang.Long",     "java.lang.Float",
      "java.lang.Double",  "java.math.BigDecimal", "java.math.BigInteger", "java.util.Date",
  };

  // Selected model parameters as the variant the energy functions take.
  EnergyModel energy_model() const;
  // Union of all recognized subsystem tags.
  std::vector<std::string> subsystem_catalog() const;

  void validate() const;  // throws ConfigError
};

// Overlays a JSON document onto the defaults. Unknown keys and type
// mismatches are errors; the result is validated before returning.
RunConfig parse_config(const std::string& json_text);
RunConfig parse_config_file(const std::string& path);

// Full dump, parseable by parse_config (round-trips to the same values).
std::string dump_config(const RunConfig& config);

}  // namespace offprof
