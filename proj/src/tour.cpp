#include "msgather/tour.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "msgather/util.hpp"

namespace msgather {

namespace {

// A 2-opt move must beat this margin to count as an improvement; the same
// margin defines local optimality in the checks.
constexpr double kImproveEps = 1e-9;

std::vector<NodeId> canonical_ids(const std::vector<NodeId>& chs) {
  std::vector<NodeId> ids(chs);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

Position pos_of(NodeId id, const std::vector<SensorNode>& nodes) {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes.size() ||
      nodes[id].id != id)
    throw LookupError("unknown node id " + std::to_string(id));
  return nodes[id].pos;
}

double walk_length(const Position& depot, const std::vector<Position>& pts) {
  if (pts.empty()) return 0.0;
  double len = distance(depot, pts.front());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    len += distance(pts[i], pts[i + 1]);
  len += distance(pts.back(), depot);
  return len;
}

// In-place 2-opt to a local optimum; first improvement, fixed scan order.
void two_opt(const Position& depot, std::vector<Position>& pts,
             std::vector<NodeId>& ids) {
  const std::size_t k = pts.size();
  if (k < 2) return;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i < k - 1; ++i) {
      const Position& before = (i == 0) ? depot : pts[i - 1];
      for (std::size_t j = i + 1; j < k; ++j) {
        const Position& after = (j == k - 1) ? depot : pts[j + 1];
        const double removed =
            distance(before, pts[i]) + distance(pts[j], after);
        const double added =
            distance(before, pts[j]) + distance(pts[i], after);
        if (added < removed - kImproveEps) {
          std::reverse(pts.begin() + i, pts.begin() + j + 1);
          std::reverse(ids.begin() + i, ids.begin() + j + 1);
          improved = true;
        }
      }
    }
  }
}

Tour make_tour(const Position& depot, std::vector<NodeId> ids,
               std::vector<Position> pts, double speed) {
  Tour t;
  t.depot = depot;
  t.visit_order = std::move(ids);
  t.length_m = walk_length(depot, pts);
  t.travel_time_s = t.length_m / speed;
  return t;
}

}  // namespace

double closed_walk_length(const Position& depot,
                          const std::vector<Position>& pts) {
  return walk_length(depot, pts);
}

std::vector<NodeId> sort_chs_by_distance(const std::vector<NodeId>& chs,
                                         const std::vector<SensorNode>& nodes,
                                         const Position& ms_pos) {
  if (chs.empty()) throw ConfigError("sort_chs_by_distance: empty CH set");
  std::vector<NodeId> ids = canonical_ids(chs);
  std::stable_sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
    const double da = distance(pos_of(a, nodes), ms_pos);
    const double db = distance(pos_of(b, nodes), ms_pos);
    if (da != db) return da < db;
    return a < b;
  });
  return ids;
}

Tour find_tsp_route(const Position& depot, const std::vector<NodeId>& chs,
                    const std::vector<SensorNode>& nodes, double speed) {
  if (chs.empty()) throw ConfigError("find_tsp_route: empty CH set");
  if (speed <= 0) throw ConfigError("find_tsp_route: speed must be > 0");
  const std::vector<NodeId> ids = canonical_ids(chs);

  // Nearest neighbor from the depot, ties to the lower id.
  std::vector<char> used(ids.size(), 0);
  std::vector<NodeId> order;
  std::vector<Position> pts;
  order.reserve(ids.size());
  pts.reserve(ids.size());
  Position cur = depot;
  for (std::size_t step = 0; step < ids.size(); ++step) {
    std::size_t best = ids.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (used[i]) continue;
      const double d = distance(cur, pos_of(ids[i], nodes));
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    used[best] = 1;
    order.push_back(ids[best]);
    pts.push_back(pos_of(ids[best], nodes));
    cur = pts.back();
  }

  two_opt(depot, pts, order);
  return make_tour(depot, std::move(order), std::move(pts), speed);
}

double tour_time_with_dwell(const Tour& t, double dwell_s) {
  return t.travel_time_s + dwell_s * static_cast<double>(t.visit_order.size());
}

Tour build_ms_tour(const std::vector<NodeId>& sorted_chs, const Position& depot,
                   double L, double speed, const std::vector<SensorNode>& nodes,
                   double dwell_s) {
  if (sorted_chs.empty()) throw ConfigError("build_ms_tour: empty CH set");
  if (L <= 0) throw ConfigError("build_ms_tour: L must be > 0");

  auto prefix_tour = [&](std::size_t c) {
    return find_tsp_route(
        depot, {sorted_chs.begin(), sorted_chs.begin() + c}, nodes, speed);
  };
  auto fits = [&](std::size_t c) {
    return tour_time_with_dwell(prefix_tour(c), dwell_s) <= L;
  };

  // Maximal feasible prefix via binary search. With a heuristic time
  // function this is exact whenever prefix time is monotone; otherwise it
  // still lands on a feasible prefix.
  std::size_t lo = 0, hi = sorted_chs.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid))
      lo = mid;
    else
      hi = mid - 1;
  }

  if (lo == 0) {
    // Even the nearest CH cannot be reached within the deadline: return the
    // degenerate empty tour rather than violating the budget.
    Tour t;
    t.depot = depot;
    t.budget_warning = true;
    return t;
  }
  return prefix_tour(lo);
}

Tour orienteering_tour(const std::vector<NodeId>& chs, const Position& depot,
                       double L, double speed,
                       const std::vector<SensorNode>& nodes, double dwell_s) {
  if (chs.empty()) throw ConfigError("orienteering_tour: empty CH set");
  if (L <= 0) throw ConfigError("orienteering_tour: L must be > 0");

  // With budget slack the full TSP tour is the answer (all scores equal).
  Tour full = find_tsp_route(depot, chs, nodes, speed);
  if (tour_time_with_dwell(full, dwell_s) <= L) return full;

  const std::vector<NodeId> ids = canonical_ids(chs);
  std::vector<NodeId> remaining = ids;
  std::vector<NodeId> order;
  std::vector<Position> pts;
  double len = 0.0;

  auto try_insert_one = [&]() -> bool {
    double best_delta = std::numeric_limits<double>::infinity();
    std::size_t best_r = remaining.size(), best_pos = 0;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      const Position p = pos_of(remaining[r], nodes);
      for (std::size_t pos = 0; pos <= pts.size(); ++pos) {
        const Position& a = (pos == 0) ? depot : pts[pos - 1];
        const Position& b = (pos == pts.size()) ? depot : pts[pos];
        const double delta =
            distance(a, p) + distance(p, b) - distance(a, b);
        const double t = (len + delta) / speed +
                         dwell_s * static_cast<double>(pts.size() + 1);
        if (t <= L && delta < best_delta) {
          best_delta = delta;
          best_r = r;
          best_pos = pos;
        }
      }
    }
    if (best_r == remaining.size()) return false;
    pts.insert(pts.begin() + best_pos, pos_of(remaining[best_r], nodes));
    order.insert(order.begin() + best_pos, remaining[best_r]);
    remaining.erase(remaining.begin() + best_r);
    len += best_delta;
    return true;
  };

  // Alternate cheapest insertion with 2-opt; the shortening may free
  // enough budget for another CH.
  while (true) {
    while (try_insert_one()) {
    }
    if (remaining.empty()) break;
    const double before = len;
    two_opt(depot, pts, order);
    len = walk_length(depot, pts);
    if (!(len < before - kImproveEps)) break;
  }
  two_opt(depot, pts, order);

  Tour t = make_tour(depot, std::move(order), std::move(pts), speed);
  if (t.visit_order.empty()) t.budget_warning = true;
  return t;
}

double compute_T_L(const std::vector<NodeId>& all_chs, const Position& depot,
                   const std::vector<SensorNode>& nodes, double speed) {
  return find_tsp_route(depot, all_chs, nodes, speed).travel_time_s;
}

void export_tour_csv(const Tour& tour, const std::vector<SensorNode>& nodes,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "seq,ch_id,x,y,leg_length_m\n";
  Position prev = tour.depot;
  for (std::size_t i = 0; i < tour.visit_order.size(); ++i) {
    const Position p = pos_of(tour.visit_order[i], nodes);
    out << i << ',' << tour.visit_order[i] << ',' << fmt_double(p.x) << ','
        << fmt_double(p.y) << ',' << fmt_double(distance(prev, p)) << '\n';
    prev = p;
  }
  out << "total,,,," << fmt_double(tour.length_m) << '\n';
  out << "travel_time_s,,,," << fmt_double(tour.travel_time_s) << '\n';
}

}  // namespace msgather
