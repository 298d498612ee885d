#include <doctest.h>

#include <cstring>

#include "msgather/core.hpp"

using namespace msgather;

namespace {
NetworkConfig cfg_with(int n, double side, std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.n = n;
  cfg.field_side = side;
  cfg.rng_seed = seed;
  return cfg;
}
}

TEST_CASE("deploy places n nodes inside the square at full energy") {
  auto nodes = deploy(cfg_with(400, 500, 1));
  REQUIRE(nodes.size() == 400);
  for (const auto& sn : nodes) {
    CHECK(sn.pos.x >= 0.0);
    CHECK(sn.pos.x <= 500.0);
    CHECK(sn.pos.y >= 0.0);
    CHECK(sn.pos.y <= 500.0);
    CHECK(sn.residual_energy == 500.0);
    CHECK(sn.role == Role::Member);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i)
    CHECK(nodes[i].id == static_cast<NodeId>(i));
}

TEST_CASE("deploy of a single node yields no neighbors") {
  auto nodes = deploy(cfg_with(1, 500, 7));
  REQUIRE(nodes.size() == 1);
  CHECK(nodes[0].residual_energy == 500.0);
  CHECK(neighbors(0, nodes, 45.0).empty());
}

TEST_CASE("deploy is bitwise deterministic for a fixed seed") {
  auto a = deploy(cfg_with(200, 500, 123));
  auto b = deploy(cfg_with(200, 500, 123));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::memcmp(&a[i].pos.x, &b[i].pos.x, sizeof(double)) == 0);
    CHECK(std::memcmp(&a[i].pos.y, &b[i].pos.y, sizeof(double)) == 0);
  }
  auto c = deploy(cfg_with(200, 500, 124));
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].pos.x != c[i].pos.x) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("deploy rejects invalid configurations") {
  CHECK_THROWS_AS(deploy(cfg_with(0, 500, 1)), ConfigError);
  CHECK_THROWS_AS(deploy(cfg_with(10, -1, 1)), ConfigError);
}

TEST_CASE("neighbor boundary is inclusive at exactly R") {
  std::vector<SensorNode> nodes(2);
  nodes[0] = {0, {0, 0}, 1.0};
  nodes[1] = {1, {0, 45.0}, 1.0};
  CHECK(neighbors(0, nodes, 45.0) == std::vector<NodeId>{1});
  CHECK(neighbors(1, nodes, 45.0) == std::vector<NodeId>{0});
  nodes[1].pos.y = 45.01;
  CHECK(neighbors(0, nodes, 45.0).empty());
}

TEST_CASE("neighbors errors") {
  std::vector<SensorNode> nodes(2);
  nodes[0] = {0, {0, 0}, 1.0};
  nodes[1] = {1, {1, 1}, 0.0};  // dead
  CHECK_THROWS_AS(neighbors(5, nodes, 10.0), LookupError);
  CHECK_THROWS_AS(neighbors(1, nodes, 10.0), ProtocolError);
  CHECK(neighbors(0, nodes, 10.0).empty());  // dead nodes never appear
}

TEST_CASE("neighbor relation is symmetric and irreflexive") {
  auto nodes = deploy(cfg_with(100, 300, 5));
  const double R = 45.0;
  for (const auto& u : nodes) {
    auto nu = neighbors(u.id, nodes, R);
    for (NodeId v : nu) {
      CHECK(v != u.id);
      auto nv = neighbors(v, nodes, R);
      CHECK(std::binary_search(nv.begin(), nv.end(), u.id));
    }
    // brute-force distance oracle
    for (const auto& v : nodes) {
      if (v.id == u.id) continue;
      const bool in = distance(u.pos, v.pos) <= R;
      CHECK(std::binary_search(nu.begin(), nu.end(), v.id) == in);
    }
  }
}

TEST_CASE("build_adjacency matches per-node queries") {
  auto nodes = deploy(cfg_with(80, 250, 9));
  nodes[3].residual_energy = 0.0;
  auto adj = build_adjacency(nodes, 45.0);
  for (const auto& u : nodes) {
    if (!u.alive()) {
      CHECK(adj[u.id].empty());
      continue;
    }
    CHECK(adj[u.id] == neighbors(u.id, nodes, 45.0));
  }
}
