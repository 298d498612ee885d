#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "msgather/clustering.hpp"
#include "msgather/core.hpp"

using namespace msgather;

namespace {

std::vector<SensorNode> grid_free_nodes(
    const std::vector<std::pair<Position, double>>& entries) {
  std::vector<SensorNode> nodes;
  for (std::size_t i = 0; i < entries.size(); ++i)
    nodes.push_back(
        {static_cast<NodeId>(i), entries[i].first, entries[i].second});
  return nodes;
}

struct ClusterRun {
  std::vector<SensorNode> nodes;
  EnergyLedger ledger;
  ClusterForest forest;
};

ClusterRun cluster_random(int n, double side, std::uint64_t seed, double R,
                          const DirectionParams* dir,
                          bool randomize_energy = false) {
  NetworkConfig cfg;
  cfg.n = n;
  cfg.field_side = side;
  cfg.rng_seed = seed;
  ClusterRun run;
  run.nodes = deploy(cfg);
  if (randomize_energy) {
    std::mt19937_64 rng(seed ^ 0xabcdef);
    std::uniform_real_distribution<double> e(100.0, 500.0);
    for (auto& sn : run.nodes) sn.residual_energy = e(rng);
  }
  run.ledger.reset(run.nodes.size(), false);
  EnergyModelParams params;
  if (dir)
    run.forest = ms_oriented_cluster_formation(run.nodes, R, *dir, run.ledger,
                                               params, 128.0, 0.0);
  else
    run.forest = initial_cluster_formation(run.nodes, R, run.ledger, params,
                                           128.0, 0.0);
  return run;
}

void check_forest_invariants(const ClusterRun& run, const DirectionParams* dir,
                             double R) {
  const auto& f = run.forest;
  const auto& nodes = run.nodes;
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    if (!f.cluster_of[u]) continue;
    // parent chain terminates at a head, no cycles
    NodeId w = static_cast<NodeId>(u);
    std::size_t steps = 0;
    while (f.parent[w]) {
      const NodeId p = *f.parent[w];
      // strict (energy, id) order along every edge
      CHECK(energy_greater(f.formation_energy[p], p, f.formation_energy[w], w));
      if (dir) CHECK(in_direction(nodes[w].pos, nodes[p].pos, *dir));
      CHECK(distance(nodes[w].pos, nodes[p].pos) <= R);
      w = p;
      REQUIRE(++steps <= nodes.size());
    }
    CHECK(f.is_head(w));
    CHECK(*f.cluster_of[u] == w);
    // brute-force parent oracle: closest strictly-greater in-range neighbor
    std::optional<NodeId> best;
    double best_d = 0;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (v == u || !f.cluster_of[v]) continue;
      const double d = distance(nodes[u].pos, nodes[v].pos);
      if (d > R) continue;
      if (!energy_greater(f.formation_energy[v], static_cast<NodeId>(v),
                          f.formation_energy[u], static_cast<NodeId>(u)))
        continue;
      if (dir && !in_direction(nodes[u].pos, nodes[v].pos, *dir)) continue;
      if (!best || d < best_d || (d == best_d && static_cast<NodeId>(v) < *best)) {
        best = static_cast<NodeId>(v);
        best_d = d;
      }
    }
    CHECK(f.parent[u] == best);
  }
}

}  // namespace

TEST_CASE("in_direction analytic cases") {
  DirectionParams dir{45.0, {10, 0}};
  CHECK(in_direction({0, 0}, {5, 0}, dir));          // straight at the MS
  dir.theta_deg = 90.0;
  CHECK_FALSE(in_direction({0, 0}, {-5, 0}, dir));   // dead opposite
  dir.theta_deg = 40.0;
  CHECK_FALSE(in_direction({0, 0}, {5, 5}, dir));    // 45 deg off
  dir.theta_deg = 50.0;
  CHECK(in_direction({0, 0}, {5, 5}, dir));
}

TEST_CASE("in_direction degenerate geometry") {
  DirectionParams dir{45.0, {10, 0}};
  CHECK_THROWS_AS(in_direction({0, 0}, {0, 0}, dir), GeometryError);
  DirectionParams colocated{45.0, {0, 0}};
  CHECK(in_direction({0, 0}, {3, 3}, colocated));  // node on the MS anchor
}

TEST_CASE("theta=90 accepts the closed half-plane toward the MS") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-100.0, 100.0);
  DirectionParams dir{90.0, {0, 0}};
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const Position sn{coord(rng), coord(rng)};
    const Position v{coord(rng), coord(rng)};
    const double mx = dir.ms_pos.x - sn.x, my = dir.ms_pos.y - sn.y;
    const double vx = v.x - sn.x, vy = v.y - sn.y;
    if (std::hypot(vx, vy) < 1e-9 || std::hypot(mx, my) < 1e-9) continue;
    const double dot = vx * mx + vy * my;
    if (std::abs(dot) < 1e-9) continue;  // knife-edge, fp-sensitive
    CHECK(in_direction(sn, v, dir) == (dot > 0));
    ++checked;
  }
  CHECK(checked > 4000);
}

TEST_CASE("two nodes with distinct energies form one cluster") {
  auto nodes = grid_free_nodes({{{0, 0}, 10.0}, {{10, 0}, 20.0}});
  EnergyLedger ledger(2, false);
  EnergyModelParams p;
  auto f = initial_cluster_formation(nodes, 45.0, ledger, p, 128.0, 0.0);
  CHECK(f.heads == std::vector<NodeId>{1});
  CHECK(f.parent[0] == NodeId{1});
  CHECK(nodes[1].role == Role::ClusterHead);
  CHECK(nodes[0].role == Role::Member);
  CHECK(*f.cluster_of[0] == 1);
}

TEST_CASE("a node with maximal energy among neighbors becomes CH") {
  auto nodes = grid_free_nodes(
      {{{0, 0}, 30.0}, {{10, 0}, 20.0}, {{0, 10}, 10.0}});
  EnergyLedger ledger(3, false);
  EnergyModelParams p;
  auto f = initial_cluster_formation(nodes, 45.0, ledger, p, 128.0, 0.0);
  CHECK(f.heads == std::vector<NodeId>{0});
  CHECK_FALSE(f.parent[0].has_value());
}

TEST_CASE("empty network is rejected") {
  std::vector<SensorNode> nodes;
  EnergyLedger ledger(0, false);
  EnergyModelParams p;
  CHECK_THROWS_AS(initial_cluster_formation(nodes, 45.0, ledger, p, 128.0, 0.0),
                  ProtocolError);
}

TEST_CASE("random forest satisfies invariants and the parent oracle") {
  auto run = cluster_random(50, 200, 3, 45.0, nullptr, true);
  check_forest_invariants(run, nullptr, 45.0);
  std::size_t covered = 0;
  for (const auto& c : run.forest.cluster_of) covered += c.has_value();
  CHECK(covered == 50);
}

TEST_CASE("ms-oriented filter can promote a lower-energy node to CH") {
  // Node 0's only higher-energy neighbor sits opposite the MS.
  DirectionParams dir{60.0, {100, 0}};
  auto nodes = grid_free_nodes({{{0, 0}, 10.0}, {{-10, 0}, 20.0}});
  EnergyLedger ledger(2, false);
  EnergyModelParams p;
  auto f = ms_oriented_cluster_formation(nodes, 45.0, dir, ledger, p, 128.0, 0.0);
  CHECK(f.is_head(0));
  CHECK(f.is_head(1));
}

TEST_CASE("theta=180 reproduces the base algorithm exactly") {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto base = cluster_random(60, 250, seed, 45.0, nullptr, true);
    DirectionParams dir{180.0, {125, 125}};
    auto oriented = cluster_random(60, 250, seed, 45.0, &dir, true);
    CHECK(base.forest.heads == oriented.forest.heads);
    for (std::size_t u = 0; u < 60; ++u)
      CHECK(base.forest.parent[u] == oriented.forest.parent[u]);
  }
}

TEST_CASE("every ms-oriented edge satisfies the direction predicate") {
  DirectionParams dir{70.0, {125, 125}};
  auto run = cluster_random(50, 250, 4, 45.0, &dir, true);
  check_forest_invariants(run, &dir, 45.0);
}

TEST_CASE("decreasing theta never decreases the CH count") {
  std::size_t prev = 0;
  for (double theta : {180.0, 120.0, 90.0, 70.0, 45.0, 30.0}) {
    DirectionParams dir{theta, {125, 125}};
    auto run = cluster_random(80, 250, 6, 45.0, &dir, true);
    if (prev > 0) CHECK(run.forest.heads.size() >= prev);
    prev = run.forest.heads.size();
  }
}

TEST_CASE("quantized advertisement turns near-ties into id order") {
  auto nodes = grid_free_nodes({{{0, 0}, 1.02}, {{10, 0}, 1.01}});
  EnergyLedger ledger(2, false);
  EnergyModelParams p;
  // quantum 0.125 puts both nodes in the same level; node 0 wins by id
  auto f = initial_cluster_formation(nodes, 45.0, ledger, p, 128.0, 0.0, 0.125);
  CHECK(f.heads == std::vector<NodeId>{0});
  CHECK(f.parent[1] == NodeId{0});
}

TEST_CASE("clustering charges broadcast and join traffic") {
  auto run = cluster_random(30, 150, 8, 45.0, nullptr, true);
  // every alive node broadcast once; members also joined
  CHECK(run.ledger.total_debited() > 0.0);
  std::size_t members = 0;
  for (std::size_t u = 0; u < 30; ++u) members += run.forest.parent[u].has_value();
  CHECK(members > 0);
}

TEST_CASE("flood_ch_locations reports every head and charges the flood") {
  auto run = cluster_random(40, 200, 12, 45.0, nullptr, true);
  EnergyLedger flood_ledger(40, true);
  EnergyModelParams p;
  auto chs = flood_ch_locations(run.forest, run.nodes, 45.0, flood_ledger, p,
                                128.0, 0.0);
  CHECK(chs.size() == run.forest.heads.size());
  for (std::size_t i = 0; i < chs.size(); ++i)
    CHECK(chs[i].first == run.forest.heads[i]);
  std::size_t tx_events = 0;
  for (const auto& e : flood_ledger.events())
    tx_events += e.kind == EventKind::Tx;
  CHECK(tx_events >= 40);  // one broadcast per alive node
}

TEST_CASE("forest CSV edge list round-trips the structure") {
  auto run = cluster_random(25, 150, 13, 45.0, nullptr, true);
  const auto path =
      (std::filesystem::temp_directory_path() / "forest_test.csv").string();
  export_forest_csv(run.forest, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "node_id,parent_id,cluster_id,is_head");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == run.forest.alive_count());
}
