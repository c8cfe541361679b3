#include "offprof/cli.hpp"

#include <fstream>
#include <ostream>

#include "offprof/calltree.hpp"
#include "offprof/codefacts.hpp"
#include "offprof/config.hpp"
#include "offprof/correlator.hpp"
#include "offprof/energy.hpp"
#include "offprof/errors.hpp"
#include "offprof/trace_model.hpp"

namespace offprof {

namespace {

RunConfig effective_config(const std::string& config_path, const std::string& model_override) {
  RunConfig config = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
  if (!model_override.empty()) {
    config.model = model_override;
  }
  config.validate();
  return config;
}

void write_artifact(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write output: " + path);
  out << content;
  if (!out) throw ParseError("write failed: " + path);
}

void emit_warnings(const std::vector<std::string>& warnings, std::ostream& diag) {
  for (const std::string& w : warnings) diag << "warning: " << w << '\n';
}

template <typename Fn>
int run_guarded(std::ostream& diag, Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const ConfigError& e) {
    diag << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    diag << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_energy(const EnergyCommand& cmd, std::ostream& diag) {
  return run_guarded(diag, [&] {
    RunConfig config = effective_config(cmd.config_path, cmd.model_override);
    EnergyModel model = config.energy_model();

    PacketTrace trace = parse_packet_trace_file(cmd.packets_path);
    MethodTraceResult methods = parse_method_trace_file(cmd.methods_path);
    emit_warnings(methods.warnings, diag);

    std::vector<Flow> flows = segment_flows(trace, config.idle_gap_us);

    NetworkCallFilter filter{config.network_call_prefixes};
    CorrelationParams params{config.bin_width_us, config.max_lag_bins, config.threshold};
    FlowAssignment assignment =
        assign_flows_to_threads(trace, flows, methods.threads, filter, params);
    emit_warnings(assignment.warnings, diag);

    Horizon horizon = default_horizon(trace.packets, model);

    std::vector<CallTree> trees;
    trees.reserve(methods.threads.size());
    for (const ThreadTrace& thread : methods.threads) {
      CallTree tree = build_call_tree(thread);
      collapse_chains(tree, config.collapse_prefixes);
      aggregate_traffic(tree, assignment, trace, model, horizon);
      trees.push_back(std::move(tree));
    }

    if (!cmd.out_dot_path.empty()) {
      write_artifact(cmd.out_dot_path, emit_dot(trees, config.min_bytes_filter));
    }
    if (!cmd.out_report_path.empty()) {
      write_artifact(cmd.out_report_path, emit_report(trees, trace, model, horizon));
    }
    if (!cmd.out_assignment_path.empty()) {
      write_artifact(cmd.out_assignment_path,
                     format_assignment_report(assignment, flows, methods.threads));
    }
  });
}

int cmd_constraints(const ConstraintsCommand& cmd, std::ostream& diag) {
  return run_guarded(diag, [&] {
    RunConfig config = effective_config(cmd.config_path, "");

    std::vector<std::string> catalog = config.subsystem_catalog();
    CodeFactsDb db = load_facts_file(cmd.facts_path, &catalog);
    emit_warnings(db.warnings(), diag);

    AnalysisOptions options;
    options.always_serializable = config.always_serializable;
    options.hardware_catalog = config.constrained_subsystems;
    options.filesystem_tags = config.filesystem_subsystems;

    std::vector<ConstraintFinding> findings = analyze_all(db, options);
    SummaryStats stats = summarize_stats(db, findings);

    if (!cmd.out_findings_path.empty()) {
      write_artifact(cmd.out_findings_path, format_findings(findings));
    }
    if (!cmd.out_stats_path.empty()) {
      write_artifact(cmd.out_stats_path, format_stats(stats));
    }
  });
}

int print_config(const std::string& config_path, const std::string& model_override,
                 std::ostream& out, std::ostream& diag) {
  return run_guarded(diag, [&] {
    RunConfig config = effective_config(config_path, model_override);
    out << dump_config(config);
  });
}

}  // namespace offprof
