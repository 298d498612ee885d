#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msgather/types.hpp"

namespace msgather {

struct EnergyModelParams {
  double tx_power_min_mw = 29.04;  // at d <= tx_dist_min_m
  double tx_power_max_mw = 57.42;  // at d == tx_dist_max_m
  double tx_dist_min_m = 4.3;
  double tx_dist_max_m = 45.0;
  double rx_power_mw = 62.0;
  double sleep_power_mw = 0.016;
  double bitrate_bps = 250000.0;

  void validate() const;  // throws ConfigError
};

// Transmit power at target distance d. Published endpoints are exact;
// between them the power is interpolated linearly in d^2 (free-space
// scaling) and clamped to the minimum below tx_dist_min_m. d beyond
// tx_dist_max_m is a hard error: the range check upstream must prevent it.
double tx_power_mw(double d, const EnergyModelParams& p);

double tx_energy_j(double packet_bits, double d, const EnergyModelParams& p);
double rx_energy_j(double packet_bits, const EnergyModelParams& p);
double sleep_energy_j(double duration_s, const EnergyModelParams& p);

enum class EventKind : std::uint8_t { Tx, Rx, Sleep };

struct EnergyEvent {
  double time = 0.0;
  NodeId node = -1;
  EventKind kind = EventKind::Tx;
  double amount_j = 0.0;
  std::string detail;
};

// Single source of truth for energy accounting. Every debit goes through
// here; residuals are floored at zero and the truncated remainder is
// tracked separately so the conservation audit closes exactly.
class EnergyLedger {
 public:
  EnergyLedger() = default;
  EnergyLedger(std::size_t node_count, bool record_events);

  void reset(std::size_t node_count, bool record_events);

  // Debits `amount` from the node; floors at zero, marks death and records
  // the death time on the crossing event. Throws ProtocolError on a dead
  // node: routing must never debit the dead.
  double debit(SensorNode& node, double time, EventKind kind, double amount,
               const char* detail);

  const std::vector<EnergyEvent>& events() const { return events_; }
  bool records_events() const { return record_events_; }

  double debited_of(NodeId id) const { return debited_.at(id); }
  double truncated_of(NodeId id) const { return truncated_.at(id); }
  // Largest single amount ever requested from this node; the floor can
  // truncate at most this much (and only on the killing event).
  double max_request_of(NodeId id) const { return max_request_.at(id); }
  double total_debited() const;
  double total_truncated() const;

  // NaN while the node is alive.
  double death_time(NodeId id) const { return death_time_.at(id); }
  const std::vector<double>& death_times() const { return death_time_; }
  std::size_t deaths() const { return deaths_; }

  std::size_t event_count() const { return event_count_; }

  void export_csv(const std::string& path) const;

 private:
  std::vector<EnergyEvent> events_;
  std::vector<double> debited_;
  std::vector<double> truncated_;
  std::vector<double> max_request_;
  std::vector<double> death_time_;
  std::size_t deaths_ = 0;
  std::size_t event_count_ = 0;
  bool record_events_ = true;
};

}  // namespace msgather
