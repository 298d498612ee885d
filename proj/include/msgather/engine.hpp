#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msgather/clustering.hpp"
#include "msgather/config.hpp"
#include "msgather/core.hpp"
#include "msgather/energy.hpp"
#include "msgather/forwarding.hpp"
#include "msgather/tour.hpp"

namespace msgather {

// Rectangular tiling of the deployment square used for MS relocation. The
// tiling is recomputed from the current tour's cluster bounding box at each
// reclustering; `cursor` counts relocations so far.
struct RegionPlan {
  double region_w = 0.0;
  double region_h = 0.0;
  int cols = 0;
  int rows = 0;
  std::vector<Position> centers;  // in visit sequence order
  long cursor = 0;
  RegionOrder order = RegionOrder::Cyclic;
};

// Tiles the field with regions of roughly (w x h) and lays out the visit
// sequence: SnakeLike walks rows top-down alternating direction starting at
// the top-left; Cyclic starts at the central region and spirals outward by
// distance from the field center.
RegionPlan make_region_plan(double field_side, double region_w, double region_h,
                            RegionOrder order);

struct RoundReport {
  long round = 0;
  int epoch = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  long generated = 0;
  long delivered = 0;
  long stranded = 0;
  long hops_total = 0;
  int below_threshold_flags = 0;
  bool stranded_flag = false;     // dead-end/loop/broken-chain seen
  bool recluster_triggered = false;
};

struct OriginRoundStat {
  long round = 0;
  NodeId origin_ch = -1;
  long generated = 0;
  long delivered = 0;
  long stranded = 0;
  long hops_total = 0;
};

struct EpochReport {
  int epoch = 0;
  double start_time = 0.0;
  Position anchor;
  int num_chs = 0;
  int tour_chs = 0;
  double tour_time_s = 0.0;
  double T_L_s = 0.0;
  bool degenerate_tour = false;
};

struct DeathRecord {
  NodeId node = -1;
  double time = 0.0;
};

struct RunSummary {
  double lifetime_s = 0.0;
  long rounds = 0;
  int epochs = 0;
  int reclusterings = 0;
  long generated = 0;
  long delivered = 0;
  long stranded = 0;
  long bs_uploads = 0;
  double T_L_initial_s = 0.0;
  double L_effective_s = 0.0;  // 0 in unconstrained mode
  int num_chs_initial = 0;
  std::optional<DeathRecord> first_death;
};

struct SimulationTrace {
  RunSummary summary;
  std::vector<RoundReport> rounds;
  std::vector<OriginRoundStat> per_origin;
  std::vector<EpochReport> epochs;
  std::vector<DeathRecord> deaths;
  std::vector<std::pair<double, double>> variance_series;  // (time, joules^2)
  std::vector<SensorNode> final_nodes;
  EnergyLedger ledger;
};

// Deterministic hash over the protocol-visible trace (rounds, epochs,
// deaths, final residuals, summary). Event retention does not affect it.
std::uint64_t trace_hash(const SimulationTrace& trace);

void export_rounds_csv(const SimulationTrace& trace, const std::string& path);
void export_per_origin_csv(const SimulationTrace& trace, const std::string& path);
void export_epochs_csv(const SimulationTrace& trace, const std::string& path);
void export_summary_csv(const SimulationTrace& trace, const std::string& path);

// One deterministic simulation instance: clustering -> tour -> gathering
// rounds -> reclustering + MS relocation, looped until the lifetime
// condition triggers.
class Simulation {
 public:
  explicit Simulation(const NetworkConfig& cfg);

  // Clustering, CH flood, tour and baselines for the current anchor.
  void establish_epoch();

  // One full gathering round; returns its report.
  RoundReport run_round();

  // True iff >= 1 CH visited this round reported a below-threshold drop.
  bool check_reclustering(const std::vector<NodeId>& flagged_chs) const;

  // Advances the region plan and moves the MS anchor; charges relocation
  // travel time (and the nodes' sleep) to the clock.
  void relocate_ms();

  // Runs epochs/rounds until the lifetime condition (or everything dies).
  SimulationTrace run();

  bool lifetime_reached() const;
  bool all_dead() const;

  // Introspection for tests and bindings.
  const std::vector<SensorNode>& nodes() const { return nodes_; }
  const ClusterForest& forest() const { return forest_; }
  const Tour& tour() const { return tour_; }
  const Position& anchor() const { return ms_.current_pos; }
  const RegionPlan& region_plan() const { return plan_; }
  double now() const { return clock_; }
  double epoch_L() const { return L_effective_; }
  const std::map<ClusterId, double>& cluster_baseline() const {
    return baseline_;
  }
  const std::map<NodeId, ForwarderState>& forwarders() const {
    return forwarders_;
  }
  const EnergyLedger& ledger() const { return ledger_; }
  const std::vector<RoundReport>& round_reports() const { return rounds_; }

 private:
  void debit_sleep_interval(double duration);
  void record_variance_sample();
  double cluster_avg_residual(ClusterId c) const;
  std::vector<NodeId> route_data_packet(Packet& pkt, NodeId start,
                                        DeliveryOutcome& out);
  void send_member_report(NodeId member);

  NetworkConfig cfg_;
  std::vector<SensorNode> nodes_;
  EnergyLedger ledger_;
  MobileSinkState ms_;
  ClusterForest forest_;
  Tour tour_;
  std::set<NodeId> tour_chs_;
  std::map<NodeId, ForwarderState> forwarders_;
  std::map<ClusterId, double> baseline_;
  RegionPlan plan_;
  double clock_ = 0.0;
  double L_effective_ = 0.0;
  double T_L_initial_ = 0.0;
  int epoch_index_ = 0;
  long round_index_ = 0;
  int reclusterings_ = 0;
  long bs_uploads_ = 0;
  std::int64_t next_seq_ = 0;
  std::vector<RoundReport> rounds_;
  std::vector<OriginRoundStat> per_origin_;
  std::vector<EpochReport> epochs_;
  std::vector<std::pair<double, double>> variance_series_;
  std::vector<NodeId> flagged_last_round_;
};

SimulationTrace run_simulation(const NetworkConfig& cfg);

}  // namespace msgather
