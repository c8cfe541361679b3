#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "offprof/trace_model.hpp"

namespace offprof {

// Event counts over fixed-width bins starting at start_us.
struct BinnedSeries {
  std::int64_t bin_width_us = 0;
  std::int64_t start_us = 0;
  std::vector<std::uint32_t> counts;
};

// Prefix filter selecting the method ids that count as network calls.
struct NetworkCallFilter {
  std::vector<std::string> prefixes;

  bool matches(const std::string& method_id) const;
};

struct CorrelationParams {
  std::int64_t bin_width_us = 100'000;
  int max_lag_bins = 2;
  double threshold = 0.3;
};

// Margin under which the best and second-best thread scores count as a tie.
inline constexpr double kLowConfidenceMargin = 0.1;

struct FlowVerdict {
  std::optional<std::int64_t> thread_id;
  double score = 0.0;
  bool low_confidence = false;
};

struct PacketCallAssoc {
  std::int64_t thread_id = 0;
  std::size_t event_index = 0;  // enter event within that thread's trace
};

struct FlowAssignment {
  std::vector<FlowVerdict> flows;                     // parallel to input flows
  std::vector<std::int64_t> thread_ids;               // ascending
  std::vector<std::vector<double>> scores;            // [flow][thread]
  std::vector<std::optional<PacketCallAssoc>> packets;  // parallel to the trace
  std::vector<std::string> warnings;
};

// Counts timestamps into ceil((end-start)/width) bins (at least one).
// Timestamps outside [start, end) are dropped; *dropped reports how many.
BinnedSeries bin_events(std::span<const std::int64_t> timestamps_us, std::int64_t bin_width_us,
                        std::int64_t start_us, std::int64_t end_us,
                        std::size_t* dropped = nullptr);

// Signed maximum over lags in [-max_lag_bins, +max_lag_bins] of the Pearson
// correlation between a and b with b shifted by the lag. Out-of-range shifted
// positions contribute their mean (zero deviation); the denominator uses the
// full-series deviation norms, so the result is always within [-1, 1]. Either
// series having zero variance yields 0.
double cross_correlation(const BinnedSeries& a, const BinnedSeries& b, int max_lag_bins);

// Timestamps of enter events whose method id passes the filter.
std::vector<std::int64_t> network_enter_events(const ThreadTrace& thread,
                                               const NetworkCallFilter& filter);

// Scores every flow against every thread's network-call series and assigns
// each flow to the best-scoring thread at or above the threshold. Also maps
// each packet of an assigned flow to the nearest-in-time network enter event
// on its thread.
FlowAssignment assign_flows_to_threads(const PacketTrace& trace, std::span<const Flow> flows,
                                       std::span<const ThreadTrace> threads,
                                       const NetworkCallFilter& filter,
                                       const CorrelationParams& params);

// Plain-text dump of an assignment: one line per flow, then one per packet.
std::string format_assignment_report(const FlowAssignment& assignment,
                                     std::span<const Flow> flows,
                                     std::span<const ThreadTrace> threads);

}  // namespace offprof
