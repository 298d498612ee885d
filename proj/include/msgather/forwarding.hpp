#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "msgather/clustering.hpp"
#include "msgather/energy.hpp"
#include "msgather/types.hpp"

namespace msgather {

// Per-CH round-robin forwarding state. The ring holds the in-direction
// neighbors in other clusters, ascending id, fixed for the epoch.
struct ForwarderState {
  std::vector<NodeId> ring;
  std::uint64_t rr_counter = 0;
};

// N_{i % |N|}, then i = i + 1. Throws RoutingError on an empty ring (the
// dead-end case; the engine strands the packet and flags the epoch).
NodeId next_hop_rr(ForwarderState& state);

// Parent-chain path node -> ... -> CH, first element the node itself.
// Throws RoutingError if an ancestor on the chain is dead (reclustering is
// required).
std::vector<NodeId> upstream_route(NodeId node, const ClusterForest& forest,
                                   const std::vector<SensorNode>& nodes);

enum class StrandReason : std::uint8_t {
  None,
  DeadEnd,     // non-tour CH with an empty ring
  DeadRelay,   // next hop or ancestor on the chain is dead
  Loop,        // packet revisited a node
  DeadPickup,  // buffered at a CH that died before the MS arrived
};

struct DeliveryOutcome {
  bool delivered = false;      // reached a tour CH buffer
  NodeId buffered_at = -1;     // tour CH holding the packet
  StrandReason strand = StrandReason::None;
  int hops = 0;                // radio hops the packet travelled
};

// Everything forwarding needs from the epoch, by reference.
struct ForwardingContext {
  std::vector<SensorNode>* nodes = nullptr;
  const ClusterForest* forest = nullptr;
  std::map<NodeId, ForwarderState>* forwarders = nullptr;  // keyed by CH
  const std::set<NodeId>* tour_chs = nullptr;
  EnergyLedger* ledger = nullptr;
  const EnergyModelParams* energy = nullptr;
  double time = 0.0;
};

// Walks one packet from its origin CH across clusters until it reaches a CH
// on the MS tour (buffered for pickup) or strands. Every tx/rx is debited;
// the packet's hop_trace is extended along the way.
DeliveryOutcome forward_to_ms(Packet& packet, NodeId origin_ch,
                              ForwardingContext& ctx);

}  // namespace msgather
