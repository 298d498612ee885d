#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace msgather {

using NodeId = std::int32_t;
// A cluster is identified by the id of its head node.
using ClusterId = std::int32_t;

// Error categories. Configuration problems are recoverable (bad user input);
// ProtocolError indicates a bug in the protocol logic and should never fire
// in a valid run.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class LookupError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class GeometryError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class RoutingError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class ProtocolError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

enum class Role : std::uint8_t { Member, ClusterHead };

struct SensorNode {
  NodeId id = -1;
  Position pos;
  double residual_energy = 0.0;  // joules
  Role role = Role::Member;
  std::optional<NodeId> parent;
  std::optional<ClusterId> cluster;

  bool alive() const { return residual_energy > 0.0; }
};

// Data packet. hop_trace records every node that held the packet, origin
// first; it exists for verification and loop detection only.
struct Packet {
  NodeId origin = -1;
  std::int64_t seq = 0;
  double size_bits = 0.0;
  std::vector<NodeId> hop_trace;
};

enum class RegionOrder : std::uint8_t { Cyclic, SnakeLike };

struct MobileSinkState {
  Position initial_pos;
  Position current_pos;
  int region_index = 0;
  RegionOrder region_order = RegionOrder::Cyclic;
};

}  // namespace msgather
