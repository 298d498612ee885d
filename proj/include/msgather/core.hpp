#pragma once

#include <vector>

#include "msgather/config.hpp"
#include "msgather/types.hpp"

namespace msgather {

// Uniform random deployment over the square, deterministic for a given
// seed. Node ids are dense (nodes[i].id == i), which the rest of the
// library relies on.
std::vector<SensorNode> deploy(const NetworkConfig& cfg);

// Alive nodes other than `node` within euclidean distance <= R, ascending
// id. Distance exactly R counts as in range. Throws LookupError for an
// unknown id and ProtocolError when the query node is dead.
std::vector<NodeId> neighbors(NodeId node, const std::vector<SensorNode>& nodes,
                              double R);

// Adjacency lists for all alive nodes (dense ids assumed); dead nodes get
// empty lists and appear in nobody's list.
std::vector<std::vector<NodeId>> build_adjacency(
    const std::vector<SensorNode>& nodes, double R);

}  // namespace msgather
