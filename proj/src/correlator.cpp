#include "offprof/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "util.hpp"

namespace offprof {

bool NetworkCallFilter::matches(const std::string& method_id) const {
  for (const std::string& prefix : prefixes) {
    if (method_id.compare(0, prefix.size(), prefix) == 0) return true;
  }
  return false;
}

BinnedSeries bin_events(std::span<const std::int64_t> timestamps_us, std::int64_t bin_width_us,
                        std::int64_t start_us, std::int64_t end_us, std::size_t* dropped) {
  if (bin_width_us <= 0) throw ConfigError("bin width must be positive");
  if (end_us < start_us) throw ConfigError("bin range end precedes start");

  std::int64_t span = end_us - start_us;
  std::size_t n_bins = static_cast<std::size_t>(
      std::max<std::int64_t>(1, (span + bin_width_us - 1) / bin_width_us));

  BinnedSeries series;
  series.bin_width_us = bin_width_us;
  series.start_us = start_us;
  series.counts.assign(n_bins, 0);

  std::size_t outside = 0;
  for (std::int64_t t : timestamps_us) {
    if (t < start_us || t >= end_us) {
      ++outside;
      continue;
    }
    series.counts[static_cast<std::size_t>((t - start_us) / bin_width_us)] += 1;
  }
  if (dropped) *dropped = outside;
  return series;
}

double cross_correlation(const BinnedSeries& a, const BinnedSeries& b, int max_lag_bins) {
  if (a.bin_width_us != b.bin_width_us || a.start_us != b.start_us ||
      a.counts.size() != b.counts.size()) {
    throw std::invalid_argument("cross_correlation requires series binned over the same range");
  }
  if (max_lag_bins < 0) throw std::invalid_argument("max_lag_bins must be non-negative");

  const std::size_t n = a.counts.size();
  if (n == 0) return 0.0;

  double mean_a = std::accumulate(a.counts.begin(), a.counts.end(), 0.0) / static_cast<double>(n);
  double mean_b = std::accumulate(b.counts.begin(), b.counts.end(), 0.0) / static_cast<double>(n);

  std::vector<double> dev_a(n), dev_b(n);
  double ss_a = 0.0, ss_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dev_a[i] = static_cast<double>(a.counts[i]) - mean_a;
    dev_b[i] = static_cast<double>(b.counts[i]) - mean_b;
    ss_a += dev_a[i] * dev_a[i];
    ss_b += dev_b[i] * dev_b[i];
  }
  if (ss_a == 0.0 || ss_b == 0.0) return 0.0;
  double denom = std::sqrt(ss_a) * std::sqrt(ss_b);

  // Shifted-out positions of b contribute mean (zero deviation), so the
  // numerator simply skips them while the denominator stays full-series.
  // Cauchy-Schwarz then keeps every lag's value inside [-1, 1].
  double best = 0.0;
  bool have_best = false;
  for (int lag = -max_lag_bins; lag <= max_lag_bins; ++lag) {
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t j = static_cast<std::int64_t>(i) + lag;
      if (j < 0 || j >= static_cast<std::int64_t>(n)) continue;
      num += dev_a[i] * dev_b[static_cast<std::size_t>(j)];
    }
    double r = num / denom;
    if (!have_best || std::abs(r) > std::abs(best)) {
      best = r;
      have_best = true;
    }
  }
  return best;
}

std::vector<std::int64_t> network_enter_events(const ThreadTrace& thread,
                                               const NetworkCallFilter& filter) {
  std::vector<std::int64_t> out;
  for (const MethodEvent& ev : thread.events) {
    if (ev.kind == EventKind::kEnter && filter.matches(ev.method_id)) {
      out.push_back(ev.timestamp_us);
    }
  }
  return out;
}

namespace {

struct ThreadSeries {
  std::int64_t thread_id = 0;
  const ThreadTrace* trace = nullptr;
  std::vector<std::int64_t> enter_ts;       // filtered network enters
  std::vector<std::size_t> enter_indices;   // matching event positions
};

}  // namespace

FlowAssignment assign_flows_to_threads(const PacketTrace& trace, std::span<const Flow> flows,
                                       std::span<const ThreadTrace> threads,
                                       const NetworkCallFilter& filter,
                                       const CorrelationParams& params) {
  if (params.bin_width_us <= 0) throw ConfigError("bin width must be positive");
  if (params.max_lag_bins < 0) throw ConfigError("max lag must be non-negative");
  if (params.threshold <= 0.0 || params.threshold > 1.0) {
    throw ConfigError("correlation threshold must be in (0, 1]");
  }

  std::vector<ThreadSeries> series;
  series.reserve(threads.size());
  for (const ThreadTrace& t : threads) {
    ThreadSeries s;
    s.thread_id = t.thread_id;
    s.trace = &t;
    for (std::size_t i = 0; i < t.events.size(); ++i) {
      const MethodEvent& ev = t.events[i];
      if (ev.kind == EventKind::kEnter && filter.matches(ev.method_id)) {
        s.enter_ts.push_back(ev.timestamp_us);
        s.enter_indices.push_back(i);
      }
    }
    series.push_back(std::move(s));
  }
  std::sort(series.begin(), series.end(),
            [](const ThreadSeries& x, const ThreadSeries& y) { return x.thread_id < y.thread_id; });

  FlowAssignment result;
  result.packets.assign(trace.packets.size(), std::nullopt);
  for (const ThreadSeries& s : series) result.thread_ids.push_back(s.thread_id);

  // Every series is binned over one shared range so correlations compare.
  bool any_event = false;
  std::int64_t min_ts = 0, max_ts = 0;
  auto widen = [&](std::int64_t t) {
    if (!any_event) {
      min_ts = max_ts = t;
      any_event = true;
    } else {
      min_ts = std::min(min_ts, t);
      max_ts = std::max(max_ts, t);
    }
  };
  for (const Flow& f : flows) {
    for (std::size_t pi : f.packet_indices) widen(trace.packets.at(pi).timestamp_us);
  }
  for (const ThreadSeries& s : series) {
    for (std::int64_t t : s.enter_ts) widen(t);
  }

  std::vector<BinnedSeries> thread_bins;
  if (any_event) {
    std::int64_t end = max_ts + 1;
    for (const ThreadSeries& s : series) {
      thread_bins.push_back(bin_events(s.enter_ts, params.bin_width_us, min_ts, end));
    }

    for (std::size_t fi = 0; fi < flows.size(); ++fi) {
      std::vector<std::int64_t> pkt_ts;
      pkt_ts.reserve(flows[fi].packet_indices.size());
      for (std::size_t pi : flows[fi].packet_indices) {
        pkt_ts.push_back(trace.packets.at(pi).timestamp_us);
      }
      BinnedSeries flow_bins = bin_events(pkt_ts, params.bin_width_us, min_ts, end);

      std::vector<double> row;
      row.reserve(series.size());
      double best = 0.0;
      double second = -std::numeric_limits<double>::infinity();
      std::size_t best_at = series.size();
      for (std::size_t ti = 0; ti < series.size(); ++ti) {
        double r = cross_correlation(flow_bins, thread_bins[ti], params.max_lag_bins);
        row.push_back(r);
        if (best_at == series.size() || r > best) {
          if (best_at != series.size()) second = std::max(second, best);
          best = r;
          best_at = ti;
        } else {
          second = std::max(second, r);
        }
      }
      result.scores.push_back(std::move(row));

      FlowVerdict verdict;
      verdict.score = (best_at == series.size()) ? 0.0 : best;
      if (best_at != series.size() && best >= params.threshold) {
        if (series[best_at].enter_ts.empty()) {
          result.warnings.push_back("flow " + std::to_string(fi) +
                                    ": matched thread has no network calls, leaving unassigned");
        } else {
          verdict.thread_id = series[best_at].thread_id;
          if (series.size() > 1 && best - second < kLowConfidenceMargin) {
            verdict.low_confidence = true;
            result.warnings.push_back(
                "flow " + std::to_string(fi) + ": low-confidence assignment to thread " +
                std::to_string(series[best_at].thread_id) + " (best " +
                detail::format_fixed6(best) + ", runner-up " + detail::format_fixed6(second) + ")");
          }
        }
      } else {
        result.warnings.push_back("flow " + std::to_string(fi) + ": no thread above threshold (best " +
                                  detail::format_fixed6(verdict.score) + ")");
      }
      result.flows.push_back(verdict);
    }
  } else {
    for (std::size_t fi = 0; fi < flows.size(); ++fi) {
      result.scores.emplace_back(series.size(), 0.0);
      result.flows.push_back(FlowVerdict{});
      result.warnings.push_back("flow " + std::to_string(fi) +
                                ": no thread above threshold (best 0.000000)");
    }
  }

  // Nearest-in-time network enter on the assigned thread; earlier wins ties.
  for (std::size_t fi = 0; fi < flows.size(); ++fi) {
    if (!result.flows[fi].thread_id) continue;
    const ThreadSeries* s = nullptr;
    for (const ThreadSeries& cand : series) {
      if (cand.thread_id == *result.flows[fi].thread_id) {
        s = &cand;
        break;
      }
    }
    for (std::size_t pi : flows[fi].packet_indices) {
      std::int64_t t = trace.packets[pi].timestamp_us;
      auto it = std::lower_bound(s->enter_ts.begin(), s->enter_ts.end(), t);
      std::size_t pos;
      if (it == s->enter_ts.begin()) {
        pos = 0;
      } else if (it == s->enter_ts.end()) {
        pos = s->enter_ts.size() - 1;
      } else {
        std::size_t next = static_cast<std::size_t>(it - s->enter_ts.begin());
        std::size_t prev = next - 1;
        pos = (t - s->enter_ts[prev] <= s->enter_ts[next] - t) ? prev : next;
      }
      result.packets[pi] = PacketCallAssoc{s->thread_id, s->enter_indices[pos]};
    }
  }

  return result;
}

std::string format_assignment_report(const FlowAssignment& assignment,
                                     std::span<const Flow> flows,
                                     std::span<const ThreadTrace> threads) {
  std::ostringstream out;

  out << "# flows: flow_index,thread_id,score,low_confidence\n";
  for (std::size_t fi = 0; fi < assignment.flows.size(); ++fi) {
    const FlowVerdict& v = assignment.flows[fi];
    out << fi << ',';
    if (v.thread_id) {
      out << *v.thread_id;
    } else {
      out << "none";
    }
    out << ',' << detail::format_fixed6(v.score) << ',' << (v.low_confidence ? 1 : 0) << '\n';
  }

  std::vector<std::size_t> packet_flow(assignment.packets.size(), flows.size());
  for (std::size_t fi = 0; fi < flows.size(); ++fi) {
    for (std::size_t pi : flows[fi].packet_indices) {
      if (pi < packet_flow.size()) packet_flow[pi] = fi;
    }
  }

  out << "# packets: packet_index,flow_index,method_id,enter_timestamp_us\n";
  for (std::size_t pi = 0; pi < assignment.packets.size(); ++pi) {
    out << pi << ',';
    if (packet_flow[pi] < flows.size()) {
      out << packet_flow[pi];
    } else {
      out << "none";
    }
    out << ',';
    if (assignment.packets[pi]) {
      const PacketCallAssoc& assoc = *assignment.packets[pi];
      const ThreadTrace* t = nullptr;
      for (const ThreadTrace& cand : threads) {
        if (cand.thread_id == assoc.thread_id) {
          t = &cand;
          break;
        }
      }
      if (t && assoc.event_index < t->events.size()) {
        const MethodEvent& ev = t->events[assoc.event_index];
        out << ev.method_id << ',' << ev.timestamp_us << '\n';
      } else {
        out << "none,none\n";
      }
    } else {
      out << "none,none\n";
    }
  }
  return out.str();
}

}  // namespace offprof
