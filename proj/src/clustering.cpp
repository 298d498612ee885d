#include "msgather/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "msgather/core.hpp"
#include "msgather/util.hpp"

namespace msgather {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

bool in_direction(const Position& sn, const Position& v,
                  const DirectionParams& dir) {
  const double vx = v.x - sn.x, vy = v.y - sn.y;
  const double mx = dir.ms_pos.x - sn.x, my = dir.ms_pos.y - sn.y;
  const double vn = std::hypot(vx, vy);
  if (vn == 0.0) throw GeometryError("in_direction: neighbor colocated with node");
  const double mn = std::hypot(mx, my);
  // Node sitting exactly on the MS anchor: every neighbor counts.
  if (mn == 0.0) return true;
  const double c = std::clamp((vx * mx + vy * my) / (vn * mn), -1.0, 1.0);
  const double angle_deg = std::acos(c) * 180.0 / kPi;
  return angle_deg <= dir.theta_deg;
}

bool energy_greater(double ea, NodeId a, double eb, NodeId b) {
  if (ea != eb) return ea > eb;
  return a < b;  // lower id treated as larger energy
}

bool ClusterForest::is_head(NodeId id) const {
  return std::binary_search(heads.begin(), heads.end(), id);
}

std::size_t ClusterForest::alive_count() const {
  std::size_t c = 0;
  for (const auto& cl : cluster_of)
    if (cl) ++c;
  return c;
}

namespace {

void require_dense_ids(const std::vector<SensorNode>& nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id != static_cast<NodeId>(i))
      throw ProtocolError("clustering requires dense node ids");
}

ClusterForest form_clusters(std::vector<SensorNode>& nodes, double R,
                            const DirectionParams* dir, EnergyLedger& ledger,
                            const EnergyModelParams& energy,
                            double control_bits, double time,
                            double energy_quantum) {
  require_dense_ids(nodes);
  const std::size_t n = nodes.size();
  std::size_t alive = 0;
  for (const auto& sn : nodes) alive += sn.alive();
  if (alive == 0) throw ProtocolError("cluster formation on an empty network");

  // Parent selection compares the energies carried in the formation
  // broadcasts, i.e. a snapshot taken before the formation traffic itself
  // is debited. Aliveness is likewise fixed at entry: a node that drains
  // on formation traffic keeps its assignment and simply fails as a relay.
  std::vector<double> snapshot(n);
  for (std::size_t i = 0; i < n; ++i) {
    double e = nodes[i].residual_energy;
    if (energy_quantum > 0.0)
      e = std::floor(e / energy_quantum) * energy_quantum;
    snapshot[i] = e;
  }
  std::vector<char> alive0(n);
  for (std::size_t i = 0; i < n; ++i) alive0[i] = nodes[i].alive();

  const auto adj = build_adjacency(nodes, R);

  ClusterForest f;
  f.parent.assign(n, std::nullopt);
  f.cluster_of.assign(n, std::nullopt);
  f.formation_energy = snapshot;

  // Final parent of each node: nearest neighbor with strictly larger
  // (tie-broken) energy, restricted to the in-direction cone when dir is
  // given.
  for (std::size_t u = 0; u < n; ++u) {
    if (!alive0[u]) continue;
    std::optional<NodeId> best;
    double best_d = 0.0;
    for (NodeId v : adj[u]) {
      if (!energy_greater(snapshot[v], v, snapshot[u], nodes[u].id)) continue;
      if (dir && !in_direction(nodes[u].pos, nodes[v].pos, *dir)) continue;
      const double d = distance(nodes[u].pos, nodes[v].pos);
      if (!best || d < best_d || (d == best_d && v < *best)) {
        best = v;
        best_d = d;
      }
    }
    f.parent[u] = best;
  }

  // Charge the message exchange: one broadcast per alive node (all alive
  // neighbors receive), then one join message per member.
  for (std::size_t u = 0; u < n; ++u) {
    if (!nodes[u].alive()) continue;
    ledger.debit(nodes[u], time, EventKind::Tx,
                 tx_energy_j(control_bits, R, energy), "bcast");
    for (NodeId v : adj[u]) {
      if (!nodes[v].alive()) continue;
      ledger.debit(nodes[v], time, EventKind::Rx,
                   rx_energy_j(control_bits, energy), "bcast");
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    if (!nodes[u].alive() || !f.parent[u]) continue;
    const NodeId p = *f.parent[u];
    const double d = distance(nodes[u].pos, nodes[p].pos);
    ledger.debit(nodes[u], time, EventKind::Tx,
                 tx_energy_j(control_bits, d, energy), "join");
    if (nodes[p].alive())
      ledger.debit(nodes[p], time, EventKind::Rx,
                   rx_energy_j(control_bits, energy), "join");
  }

  // Roots become CHs; every other node inherits its root's cluster.
  for (std::size_t u = 0; u < n; ++u) {
    if (!alive0[u]) continue;
    if (!f.parent[u]) f.heads.push_back(nodes[u].id);
  }
  std::sort(f.heads.begin(), f.heads.end());

  for (std::size_t u = 0; u < n; ++u) {
    if (!alive0[u]) continue;
    NodeId w = nodes[u].id;
    std::size_t guard = 0;
    while (f.parent[w]) {
      w = *f.parent[w];
      if (++guard > n) throw ProtocolError("cycle in cluster forest");
    }
    f.cluster_of[u] = w;  // cluster id == head id
    f.members[w].push_back(nodes[u].id);
  }
  for (auto& [cid, roster] : f.members) std::sort(roster.begin(), roster.end());

  for (std::size_t u = 0; u < n; ++u) {
    if (!alive0[u]) continue;
    nodes[u].parent = f.parent[u];
    nodes[u].cluster = f.cluster_of[u];
    nodes[u].role = f.parent[u] ? Role::Member : Role::ClusterHead;
  }
  return f;
}

}  // namespace

ClusterForest initial_cluster_formation(std::vector<SensorNode>& nodes,
                                        double R, EnergyLedger& ledger,
                                        const EnergyModelParams& energy,
                                        double control_bits, double time,
                                        double energy_quantum) {
  return form_clusters(nodes, R, nullptr, ledger, energy, control_bits, time,
                       energy_quantum);
}

ClusterForest ms_oriented_cluster_formation(std::vector<SensorNode>& nodes,
                                            double R, const DirectionParams& dir,
                                            EnergyLedger& ledger,
                                            const EnergyModelParams& energy,
                                            double control_bits, double time,
                                            double energy_quantum) {
  if (!(dir.theta_deg > 0 && dir.theta_deg <= 180))
    throw ConfigError("theta must be in (0, 180]");
  return form_clusters(nodes, R, &dir, ledger, energy, control_bits, time,
                       energy_quantum);
}

std::vector<std::pair<NodeId, Position>> flood_ch_locations(
    const ClusterForest& forest, std::vector<SensorNode>& nodes, double R,
    EnergyLedger& ledger, const EnergyModelParams& energy, double control_bits,
    double time) {
  const auto adj = build_adjacency(nodes, R);
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    if (!nodes[u].alive()) continue;
    ledger.debit(nodes[u], time, EventKind::Tx,
                 tx_energy_j(control_bits, R, energy), "flood");
    for (NodeId v : adj[u]) {
      if (!nodes[v].alive()) continue;
      ledger.debit(nodes[v], time, EventKind::Rx,
                   rx_energy_j(control_bits, energy), "flood");
    }
  }
  std::vector<std::pair<NodeId, Position>> out;
  out.reserve(forest.heads.size());
  for (NodeId h : forest.heads) out.emplace_back(h, nodes[h].pos);
  return out;
}

void export_forest_csv(const ClusterForest& forest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "node_id,parent_id,cluster_id,is_head\n";
  for (std::size_t u = 0; u < forest.cluster_of.size(); ++u) {
    if (!forest.cluster_of[u]) continue;  // dead or undeployed
    out << u << ',';
    if (forest.parent[u]) out << *forest.parent[u];
    out << ',' << *forest.cluster_of[u] << ','
        << (forest.parent[u] ? 0 : 1) << '\n';
  }
}

}  // namespace msgather
