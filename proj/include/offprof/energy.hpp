#pragma once

#include <cstdint>
#include <span>
#include <variant>

#include "offprof/errors.hpp"
#include "offprof/trace_model.hpp"

namespace offprof {

// Deterministic cellular radio power model. The interface keeps a high-power
// state while packets are flowing, then steps down through a mid-power state
// on inactivity timers before returning to idle. Power levels are milliwatts,
// timers microseconds.
struct RrcModelParams {
  double p_dch_mw = 800.0;
  double p_fach_mw = 460.0;
  double p_idle_mw = 0.0;
  std::int64_t t_dch_us = 5'000'000;   // high-power hold after last packet
  std::int64_t t_fach_us = 12'000'000; // mid-power hold after the high state
  double per_byte_tx_uj = 0.0;
  double per_byte_rx_uj = 0.0;

  void validate() const;
};

// Wi-Fi interface model: active power while any packet's tail window covers
// the instant, idle power otherwise, plus optional per-byte costs.
struct WifiModelParams {
  double p_active_mw = 700.0;
  std::int64_t t_tail_us = 200'000;
  double p_idle_mw = 0.0;
  double per_byte_tx_uj = 0.0;
  double per_byte_rx_uj = 0.0;

  void validate() const;
};

using EnergyModel = std::variant<RrcModelParams, WifiModelParams>;

void validate(const EnergyModel& model);

// Closed observation window [start_us, end_us]. Every packet handed to an
// estimator must fall inside it.
struct Horizon {
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;
};

// Lower and upper offloading estimates in joules. e_min is the energy the
// traffic adds on top of everything else; e_max charges the traffic for the
// whole radio activity it participates in.
struct EnergyBounds {
  double e_min_j = 0.0;
  double e_max_j = 0.0;
};

// Horizon that covers the packets plus the full radio tail after the last
// one. Empty packet set yields {0, 0}.
Horizon default_horizon(std::span<const PacketRecord> packets, const EnergyModel& model);

// Integrated interface energy over the horizon in joules. Packets must be
// time-ordered and inside the horizon.
double estimate_energy_3g(std::span<const PacketRecord> packets, const RrcModelParams& params,
                          const Horizon& horizon);
double estimate_energy_wifi(std::span<const PacketRecord> packets, const WifiModelParams& params,
                            const Horizon& horizon);
double estimate_energy(std::span<const PacketRecord> packets, const EnergyModel& model,
                       const Horizon& horizon);

// Bounds for the traffic identified by subset_indices (strictly increasing
// positions into packets): e_max is the energy of the subset alone, e_min is
// the full-trace energy minus the energy of the remainder.
EnergyBounds energy_bounds(std::span<const PacketRecord> packets,
                           std::span<const std::size_t> subset_indices, const EnergyModel& model,
                           const Horizon& horizon);

}  // namespace offprof
