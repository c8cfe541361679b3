#pragma once

#include <iosfwd>
#include <string>

namespace offprof {

// Pipeline drivers behind the command-line front-end. Both return a process
// exit code: 0 success, 1 input parse/validation failure, 2 bad
// configuration. Diagnostics (warnings, error messages) go to diag; data
// artifacts go only to the named output files.

struct EnergyCommand {
  std::string packets_path;
  std::string methods_path;
  std::string config_path;          // empty: built-in defaults
  std::string out_dot_path;         // empty: skip this artifact
  std::string out_report_path;
  std::string out_assignment_path;
  std::string model_override;       // empty: use the config's model
};

struct ConstraintsCommand {
  std::string facts_path;
  std::string config_path;
  std::string out_findings_path;
  std::string out_stats_path;
};

int cmd_energy(const EnergyCommand& cmd, std::ostream& diag);
int cmd_constraints(const ConstraintsCommand& cmd, std::ostream& diag);

// Writes the effective configuration (defaults overlaid with config_path if
// given) to out. The dump parses back to the same values.
int print_config(const std::string& config_path, const std::string& model_override,
                 std::ostream& out, std::ostream& diag);

}  // namespace offprof
