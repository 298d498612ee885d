#include "msgather/forwarding.hpp"

#include <unordered_set>

namespace msgather {

NodeId next_hop_rr(ForwarderState& state) {
  if (state.ring.empty())
    throw RoutingError("round-robin forwarding from a CH with no ring");
  const NodeId target =
      state.ring[state.rr_counter % state.ring.size()];
  ++state.rr_counter;
  return target;
}

std::vector<NodeId> upstream_route(NodeId node, const ClusterForest& forest,
                                   const std::vector<SensorNode>& nodes) {
  if (node < 0 || static_cast<std::size_t>(node) >= nodes.size())
    throw LookupError("unknown node id " + std::to_string(node));
  if (!nodes[node].alive())
    throw ProtocolError("upstream_route for dead node " + std::to_string(node));
  if (!forest.cluster_of[node])
    throw ProtocolError("upstream_route for unclustered node " +
                        std::to_string(node));

  std::vector<NodeId> path{node};
  NodeId w = node;
  while (forest.parent[w]) {
    w = *forest.parent[w];
    if (!nodes[w].alive())
      throw RoutingError("upstream chain of node " + std::to_string(node) +
                         " broken at dead node " + std::to_string(w) +
                         "; reclustering required");
    path.push_back(w);
    if (path.size() > nodes.size())
      throw ProtocolError("cycle in parent chain");
  }
  return path;
}

DeliveryOutcome forward_to_ms(Packet& packet, NodeId origin_ch,
                              ForwardingContext& ctx) {
  auto& nodes = *ctx.nodes;
  const auto& forest = *ctx.forest;
  if (!forest.is_head(origin_ch))
    throw ProtocolError("forward_to_ms origin " + std::to_string(origin_ch) +
                        " is not a CH");

  DeliveryOutcome out;
  if (packet.hop_trace.empty() || packet.hop_trace.back() != origin_ch)
    packet.hop_trace.push_back(origin_ch);
  std::unordered_set<NodeId> visited(packet.hop_trace.begin(),
                                     packet.hop_trace.end());

  NodeId cur = origin_ch;
  while (true) {
    if (ctx.tour_chs->count(cur)) {
      out.delivered = true;
      out.buffered_at = cur;
      return out;
    }
    // Non-tour CH: round-robin hop into another cluster.
    auto fw = ctx.forwarders->find(cur);
    if (fw == ctx.forwarders->end() || fw->second.ring.empty()) {
      out.strand = StrandReason::DeadEnd;
      return out;
    }
    if (!nodes[cur].alive()) {
      out.strand = StrandReason::DeadRelay;
      return out;
    }
    const NodeId nxt = next_hop_rr(fw->second);
    const double d = distance(nodes[cur].pos, nodes[nxt].pos);
    ctx.ledger->debit(nodes[cur], ctx.time, EventKind::Tx,
                      tx_energy_j(packet.size_bits, d, *ctx.energy), "fwd");
    ++out.hops;
    if (!nodes[nxt].alive()) {
      out.strand = StrandReason::DeadRelay;
      return out;
    }
    ctx.ledger->debit(nodes[nxt], ctx.time, EventKind::Rx,
                      rx_energy_j(packet.size_bits, *ctx.energy), "fwd");
    packet.hop_trace.push_back(nxt);
    if (!visited.insert(nxt).second) {
      out.strand = StrandReason::Loop;
      return out;
    }

    // Receiver relays it to its own CH over its regular upstream path.
    NodeId w = nxt;
    while (forest.parent[w]) {
      const NodeId p = *forest.parent[w];
      if (!nodes[w].alive()) {
        out.strand = StrandReason::DeadRelay;
        return out;
      }
      const double hop_d = distance(nodes[w].pos, nodes[p].pos);
      ctx.ledger->debit(nodes[w], ctx.time, EventKind::Tx,
                        tx_energy_j(packet.size_bits, hop_d, *ctx.energy),
                        "fwd");
      ++out.hops;
      if (!nodes[p].alive()) {
        out.strand = StrandReason::DeadRelay;
        return out;
      }
      ctx.ledger->debit(nodes[p], ctx.time, EventKind::Rx,
                        rx_energy_j(packet.size_bits, *ctx.energy), "fwd");
      packet.hop_trace.push_back(p);
      if (!visited.insert(p).second) {
        out.strand = StrandReason::Loop;
        return out;
      }
      w = p;
    }
    cur = w;
  }
}

}  // namespace msgather
