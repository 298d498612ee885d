#include "msgather/energy.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "msgather/util.hpp"

namespace msgather {

void EnergyModelParams::validate() const {
  if (tx_power_min_mw <= 0 || tx_power_max_mw <= 0 || rx_power_mw <= 0)
    throw ConfigError("energy: tx/rx powers must be positive");
  if (tx_power_min_mw > tx_power_max_mw)
    throw ConfigError("energy: tx_power_min_mw must be <= tx_power_max_mw");
  if (sleep_power_mw < 0)
    throw ConfigError("energy: sleep_power_mw must be >= 0");
  if (!(tx_dist_min_m < tx_dist_max_m))
    throw ConfigError("energy: tx_dist_min_m must be < tx_dist_max_m");
  if (bitrate_bps <= 0) throw ConfigError("energy: bitrate_bps must be > 0");
}

double tx_power_mw(double d, const EnergyModelParams& p) {
  if (d < 0) throw GeometryError("tx_power: negative distance");
  if (d > p.tx_dist_max_m)
    throw RoutingError("tx_power: distance " + std::to_string(d) +
                       " exceeds maximum transmission range " +
                       std::to_string(p.tx_dist_max_m));
  if (d <= p.tx_dist_min_m) return p.tx_power_min_mw;
  const double d2 = d * d;
  const double lo2 = p.tx_dist_min_m * p.tx_dist_min_m;
  const double hi2 = p.tx_dist_max_m * p.tx_dist_max_m;
  const double t = (d2 - lo2) / (hi2 - lo2);
  return p.tx_power_min_mw + (p.tx_power_max_mw - p.tx_power_min_mw) * t;
}

double tx_energy_j(double packet_bits, double d, const EnergyModelParams& p) {
  if (packet_bits <= 0)
    throw ConfigError("tx_energy: packet size must be positive");
  return tx_power_mw(d, p) * 1e-3 * (packet_bits / p.bitrate_bps);
}

double rx_energy_j(double packet_bits, const EnergyModelParams& p) {
  if (packet_bits <= 0)
    throw ConfigError("rx_energy: packet size must be positive");
  return p.rx_power_mw * 1e-3 * (packet_bits / p.bitrate_bps);
}

double sleep_energy_j(double duration_s, const EnergyModelParams& p) {
  if (duration_s < 0) throw ConfigError("sleep_energy: negative duration");
  return p.sleep_power_mw * 1e-3 * duration_s;
}

EnergyLedger::EnergyLedger(std::size_t node_count, bool record_events) {
  reset(node_count, record_events);
}

void EnergyLedger::reset(std::size_t node_count, bool record_events) {
  events_.clear();
  debited_.assign(node_count, 0.0);
  truncated_.assign(node_count, 0.0);
  max_request_.assign(node_count, 0.0);
  death_time_.assign(node_count, std::numeric_limits<double>::quiet_NaN());
  deaths_ = 0;
  event_count_ = 0;
  record_events_ = record_events;
}

double EnergyLedger::debit(SensorNode& node, double time, EventKind kind,
                           double amount, const char* detail) {
  if (!node.alive())
    throw ProtocolError("debit on dead node " + std::to_string(node.id));
  if (amount < 0) throw ProtocolError("negative debit");

  max_request_[node.id] = std::max(max_request_[node.id], amount);
  const double applied = std::min(amount, node.residual_energy);
  node.residual_energy -= applied;
  debited_[node.id] += applied;
  if (applied < amount) truncated_[node.id] += amount - applied;
  if (node.residual_energy <= 0.0) {
    node.residual_energy = 0.0;
    death_time_[node.id] = time;
    ++deaths_;
  }
  ++event_count_;
  if (record_events_)
    events_.push_back(EnergyEvent{time, node.id, kind, applied, detail});
  return node.residual_energy;
}

double EnergyLedger::total_debited() const {
  return std::accumulate(debited_.begin(), debited_.end(), 0.0);
}

double EnergyLedger::total_truncated() const {
  return std::accumulate(truncated_.begin(), truncated_.end(), 0.0);
}

void EnergyLedger::export_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "time,node,kind,amount_joules,detail\n";
  for (const auto& e : events_) {
    const char* kind = e.kind == EventKind::Tx   ? "tx"
                       : e.kind == EventKind::Rx ? "rx"
                                                 : "sleep";
    out << fmt_double(e.time) << ',' << e.node << ',' << kind << ','
        << fmt_double(e.amount_j) << ',' << e.detail << '\n';
  }
}

}  // namespace msgather
