// offprof: offline offloading profiler.
//
// `offprof energy` correlates a packet capture with a method trace and
// reports per-method network traffic and energy bounds; `offprof
// constraints` analyzes a code-facts document for offloading blockers.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "offprof/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"offloading profiler: network energy attribution and migration constraints"};
  app.require_subcommand(0, 1);

  bool print_config = false;
  std::string top_config;
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");
  app.add_option("--config", top_config, "configuration file (JSON)");

  offprof::EnergyCommand energy;
  CLI::App* energy_cmd = app.add_subcommand("energy", "attribute traffic and energy to methods");
  energy_cmd->add_option("--packets", energy.packets_path, "packet trace file")->required();
  energy_cmd->add_option("--methods", energy.methods_path, "method trace file")->required();
  energy_cmd->add_option("--config", energy.config_path, "configuration file (JSON)");
  energy_cmd->add_option("--out-dot", energy.out_dot_path, "write the annotated call graph (DOT)");
  energy_cmd->add_option("--out-report", energy.out_report_path, "write the per-method CSV report");
  energy_cmd->add_option("--out-assignment", energy.out_assignment_path,
                         "write the flow/packet assignment detail");
  energy_cmd->add_option("--model", energy.model_override, "energy model override")
      ->check(CLI::IsMember({"3g", "wifi"}));

  offprof::ConstraintsCommand constraints;
  CLI::App* constraints_cmd =
      app.add_subcommand("constraints", "find migration constraints in a code-facts document");
  constraints_cmd->add_option("--facts", constraints.facts_path, "code-facts document (JSON)")
      ->required();
  constraints_cmd->add_option("--config", constraints.config_path, "configuration file (JSON)");
  constraints_cmd->add_option("--out-findings", constraints.out_findings_path,
                              "write per-method findings");
  constraints_cmd->add_option("--out-stats", constraints.out_stats_path,
                              "write summary statistics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (print_config) {
    return offprof::print_config(top_config, energy.model_override, std::cout, std::cerr);
  }
  if (energy_cmd->parsed()) {
    if (energy.config_path.empty()) energy.config_path = top_config;
    return offprof::cmd_energy(energy, std::cerr);
  }
  if (constraints_cmd->parsed()) {
    if (constraints.config_path.empty()) constraints.config_path = top_config;
    return offprof::cmd_constraints(constraints, std::cerr);
  }

  std::cerr << "error: expected a subcommand (energy | constraints) or --print-config\n";
  std::cerr << app.help();
  return 2;
}
