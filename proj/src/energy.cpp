#include "offprof/energy.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace offprof {

namespace {

// Microsecond-milliwatt product to joules: mW * us = 1e-3 J/s * 1e-6 s.
constexpr double kMwUsToJ = 1e-9;
constexpr double kUjToJ = 1e-6;

void check_ordering_and_horizon(std::span<const PacketRecord> packets, const Horizon& hz) {
  if (hz.end_us < hz.start_us) throw ConfigError("horizon end precedes start");
  std::int64_t prev = hz.start_us;
  bool first = true;
  for (const PacketRecord& p : packets) {
    if (p.timestamp_us < hz.start_us || p.timestamp_us > hz.end_us) {
      throw std::invalid_argument("packet outside horizon at t=" +
                                  std::to_string(p.timestamp_us));
    }
    if (!first && p.timestamp_us < prev) {
      throw std::invalid_argument("packets not time-ordered at t=" +
                                  std::to_string(p.timestamp_us));
    }
    prev = p.timestamp_us;
    first = false;
  }
}

double per_byte_energy(std::span<const PacketRecord> packets, double tx_uj, double rx_uj) {
  double uj = 0.0;
  for (const PacketRecord& p : packets) {
    uj += static_cast<double>(p.size_bytes) *
          (p.direction == Direction::kOutbound ? tx_uj : rx_uj);
  }
  return uj * kUjToJ;
}

}  // namespace

void RrcModelParams::validate() const {
  if (p_dch_mw < 0 || p_fach_mw < 0 || p_idle_mw < 0) {
    throw ConfigError("3g power levels must be non-negative");
  }
  if (p_dch_mw < p_fach_mw || p_fach_mw < p_idle_mw) {
    throw ConfigError("3g power levels must satisfy p_dch >= p_fach >= p_idle");
  }
  if (t_dch_us < 0 || t_fach_us < 0) {
    throw ConfigError("3g inactivity timers must be non-negative");
  }
  if (per_byte_tx_uj < 0 || per_byte_rx_uj < 0) {
    throw ConfigError("per-byte costs must be non-negative");
  }
}

void WifiModelParams::validate() const {
  if (p_active_mw < 0 || p_idle_mw < 0) {
    throw ConfigError("wifi power levels must be non-negative");
  }
  if (p_active_mw < p_idle_mw) {
    throw ConfigError("wifi power levels must satisfy p_active >= p_idle");
  }
  if (t_tail_us < 0) {
    throw ConfigError("wifi tail time must be non-negative");
  }
  if (per_byte_tx_uj < 0 || per_byte_rx_uj < 0) {
    throw ConfigError("per-byte costs must be non-negative");
  }
}

void validate(const EnergyModel& model) {
  std::visit([](const auto& m) { m.validate(); }, model);
}

Horizon default_horizon(std::span<const PacketRecord> packets, const EnergyModel& model) {
  if (packets.empty()) return Horizon{0, 0};
  std::int64_t tail = std::visit(
      [](const auto& m) -> std::int64_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RrcModelParams>) {
          return m.t_dch_us + m.t_fach_us;
        } else {
          return m.t_tail_us;
        }
      },
      model);
  return Horizon{packets.front().timestamp_us, packets.back().timestamp_us + tail};
}

double estimate_energy_3g(std::span<const PacketRecord> packets, const RrcModelParams& params,
                          const Horizon& horizon) {
  params.validate();
  check_ordering_and_horizon(packets, horizon);

  double joules = 0.0;
  std::int64_t cursor = horizon.start_us;

  if (!packets.empty()) {
    // Idle until the first packet promotes the radio to the high state.
    joules += params.p_idle_mw * static_cast<double>(packets.front().timestamp_us - cursor) *
              kMwUsToJ;
    cursor = packets.front().timestamp_us;
  }

  for (std::size_t i = 0; i < packets.size(); ++i) {
    std::int64_t next =
        (i + 1 < packets.size()) ? packets[i + 1].timestamp_us : horizon.end_us;
    std::int64_t gap = next - cursor;

    std::int64_t dch = std::min(gap, params.t_dch_us);
    std::int64_t fach = std::min(std::max<std::int64_t>(gap - params.t_dch_us, 0), params.t_fach_us);
    std::int64_t idle = gap - dch - fach;

    joules += params.p_dch_mw * static_cast<double>(dch) * kMwUsToJ;
    joules += params.p_fach_mw * static_cast<double>(fach) * kMwUsToJ;
    joules += params.p_idle_mw * static_cast<double>(idle) * kMwUsToJ;
    cursor = next;
  }

  if (packets.empty()) {
    joules += params.p_idle_mw * static_cast<double>(horizon.end_us - cursor) * kMwUsToJ;
  }

  joules += per_byte_energy(packets, params.per_byte_tx_uj, params.per_byte_rx_uj);
  return joules;
}

double estimate_energy_wifi(std::span<const PacketRecord> packets, const WifiModelParams& params,
                            const Horizon& horizon) {
  params.validate();
  check_ordering_and_horizon(packets, horizon);

  // Sweep the union of [t, t+tail] windows; everything outside is idle time.
  double joules = 0.0;
  std::int64_t active_us = 0;
  std::int64_t span_start = 0;
  std::int64_t span_end = -1;  // empty

  for (const PacketRecord& p : packets) {
    std::int64_t b = p.timestamp_us;
    std::int64_t e = std::min(p.timestamp_us + params.t_tail_us, horizon.end_us);
    if (span_end < span_start) {
      span_start = b;
      span_end = e;
    } else if (b <= span_end) {
      span_end = std::max(span_end, e);
    } else {
      active_us += span_end - span_start;
      span_start = b;
      span_end = e;
    }
  }
  if (span_end >= span_start && !packets.empty()) {
    active_us += span_end - span_start;
  }

  std::int64_t total_us = horizon.end_us - horizon.start_us;
  joules += params.p_active_mw * static_cast<double>(active_us) * kMwUsToJ;
  joules += params.p_idle_mw * static_cast<double>(total_us - active_us) * kMwUsToJ;
  joules += per_byte_energy(packets, params.per_byte_tx_uj, params.per_byte_rx_uj);
  return joules;
}

double estimate_energy(std::span<const PacketRecord> packets, const EnergyModel& model,
                       const Horizon& horizon) {
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RrcModelParams>) {
          return estimate_energy_3g(packets, m, horizon);
        } else {
          return estimate_energy_wifi(packets, m, horizon);
        }
      },
      model);
}

EnergyBounds energy_bounds(std::span<const PacketRecord> packets,
                           std::span<const std::size_t> subset_indices, const EnergyModel& model,
                           const Horizon& horizon) {
  std::vector<PacketRecord> subset;
  std::vector<PacketRecord> rest;
  subset.reserve(subset_indices.size());
  rest.reserve(packets.size() - std::min(packets.size(), subset_indices.size()));

  std::size_t cursor = 0;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    if (cursor < subset_indices.size() && subset_indices[cursor] == i) {
      subset.push_back(packets[i]);
      ++cursor;
    } else {
      rest.push_back(packets[i]);
    }
  }
  if (cursor != subset_indices.size()) {
    throw std::invalid_argument("subset indices must be strictly increasing and in range");
  }

  double e_all = estimate_energy(packets, model, horizon);
  double e_rest = estimate_energy(rest, model, horizon);
  double e_max = estimate_energy(subset, model, horizon);

  // Both inequalities hold exactly for these models; the clamp only absorbs
  // floating-point rounding in the subtraction.
  double e_min = std::clamp(e_all - e_rest, 0.0, e_max);
  return EnergyBounds{e_min, e_max};
}

}  // namespace offprof
