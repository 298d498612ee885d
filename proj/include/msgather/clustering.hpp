#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msgather/energy.hpp"
#include "msgather/types.hpp"

namespace msgather {

struct DirectionParams {
  double theta_deg = 70.0;  // cone half-angle, (0, 180]
  Position ms_pos;
};

// True iff the angle between (sn -> v) and (sn -> ms) is <= theta.
// sn colocated with the MS accepts every neighbor; v colocated with sn is
// degenerate and throws GeometryError.
bool in_direction(const Position& sn, const Position& v,
                  const DirectionParams& dir);

struct ClusterForest {
  std::vector<std::optional<NodeId>> parent;      // by node id
  std::vector<NodeId> heads;                      // ascending id
  std::vector<std::optional<ClusterId>> cluster_of;
  std::map<ClusterId, std::vector<NodeId>> members;  // roster incl. the head
  // Residual energies advertised in the formation broadcasts; parent
  // selection and the edge-ordering invariant are defined on these.
  std::vector<double> formation_energy;

  bool is_head(NodeId id) const;
  std::size_t alive_count() const;
};

// Energy comparison used everywhere in cluster formation: ties broken by
// id (lower id counts as larger energy), which makes the order strict.
bool energy_greater(double ea, NodeId a, double eb, NodeId b);

// Base cluster formation: every alive node adopts as parent its closest
// strictly-higher-energy neighbor within R; nodes without one become CHs.
// This is the fixed point of the incremental replace-parent message
// exchange once all broadcasts are in. Message costs are charged through
// the ledger: one broadcast per node (every neighbor receives) plus one
// join message per member.
//
// energy_quantum > 0 quantizes the residual energy carried in the
// formation broadcasts to that step (a finite message field); comparisons
// and the forest's formation_energy then use the advertised values, with
// the id tie-break resolving equal levels.
ClusterForest initial_cluster_formation(std::vector<SensorNode>& nodes,
                                        double R, EnergyLedger& ledger,
                                        const EnergyModelParams& energy,
                                        double control_bits, double time,
                                        double energy_quantum = 0.0);

// Same, but the candidate-parent set of each node is first filtered by
// in_direction toward the MS anchor.
ClusterForest ms_oriented_cluster_formation(std::vector<SensorNode>& nodes,
                                            double R, const DirectionParams& dir,
                                            EnergyLedger& ledger,
                                            const EnergyModelParams& energy,
                                            double control_bits, double time,
                                            double energy_quantum = 0.0);

// CHs notify the MS of their locations by flooding: one broadcast per alive
// node, every neighbor pays reception. Returns (ch id, position) pairs in
// ascending id order.
std::vector<std::pair<NodeId, Position>> flood_ch_locations(
    const ClusterForest& forest, std::vector<SensorNode>& nodes, double R,
    EnergyLedger& ledger, const EnergyModelParams& energy, double control_bits,
    double time);

// CSV edge list: node_id,parent_id,cluster_id,is_head.
void export_forest_csv(const ClusterForest& forest, const std::string& path);

}  // namespace msgather
