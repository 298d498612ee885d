#include "msgather/core.hpp"

#include <algorithm>

#include "msgather/util.hpp"

namespace msgather {

std::vector<SensorNode> deploy(const NetworkConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.rng_seed);
  std::vector<SensorNode> nodes;
  nodes.reserve(cfg.n);
  for (int i = 0; i < cfg.n; ++i) {
    SensorNode sn;
    sn.id = i;
    sn.pos.x = rng.uniform(0.0, cfg.field_side);
    sn.pos.y = rng.uniform(0.0, cfg.field_side);
    sn.residual_energy = cfg.initial_energy_j;
    nodes.push_back(sn);
  }
  return nodes;
}

std::vector<NodeId> neighbors(NodeId node, const std::vector<SensorNode>& nodes,
                              double R) {
  const SensorNode* self = nullptr;
  for (const auto& sn : nodes)
    if (sn.id == node) {
      self = &sn;
      break;
    }
  if (!self) throw LookupError("unknown node id " + std::to_string(node));
  if (!self->alive())
    throw ProtocolError("neighbor query for dead node " + std::to_string(node));

  std::vector<NodeId> out;
  for (const auto& sn : nodes) {
    if (sn.id == node || !sn.alive()) continue;
    if (distance(self->pos, sn.pos) <= R) out.push_back(sn.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<NodeId>> build_adjacency(
    const std::vector<SensorNode>& nodes, double R) {
  const std::size_t n = nodes.size();
  std::vector<std::vector<NodeId>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!nodes[i].alive()) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!nodes[j].alive()) continue;
      if (distance(nodes[i].pos, nodes[j].pos) <= R) {
        adj[i].push_back(nodes[j].id);
        adj[j].push_back(nodes[i].id);
      }
    }
  }
  for (auto& lst : adj) std::sort(lst.begin(), lst.end());
  return adj;
}

}  // namespace msgather
