#pragma once

#include <string>
#include <vector>

#include "msgather/types.hpp"

namespace msgather {

struct Tour {
  Position depot;
  std::vector<NodeId> visit_order;  // CHs, no duplicates
  double length_m = 0.0;            // closed walk depot -> visits -> depot
  double travel_time_s = 0.0;       // length_m / speed, exactly
  // Set when even the smallest candidate tour exceeded the budget and the
  // degenerate empty tour was returned instead.
  bool budget_warning = false;
};

double closed_walk_length(const Position& depot,
                          const std::vector<Position>& pts);

// CH ids ordered by ascending distance from ms_pos, ties by id.
std::vector<NodeId> sort_chs_by_distance(const std::vector<NodeId>& chs,
                                         const std::vector<SensorNode>& nodes,
                                         const Position& ms_pos);

// Nearest-neighbor construction followed by 2-opt to a local optimum.
// Deterministic: the input set is canonicalized by id, ties go to the
// lower id, and 2-opt scans in a fixed order.
Tour find_tsp_route(const Position& depot, const std::vector<NodeId>& chs,
                    const std::vector<SensorNode>& nodes, double speed);

// Tour time including per-stop dwell.
double tour_time_with_dwell(const Tour& t, double dwell_s);

// Binary search for the maximal distance-sorted prefix whose tour fits the
// budget L (seconds). `sorted_chs` must come from sort_chs_by_distance.
// When even the 1-CH tour exceeds L, returns the empty tour with
// budget_warning set.
Tour build_ms_tour(const std::vector<NodeId>& sorted_chs, const Position& depot,
                   double L, double speed, const std::vector<SensorNode>& nodes,
                   double dwell_s = 0.0);

// Budget-constrained visit-count maximization (identical scores): greedy
// cheapest insertion, 2-opt, then renewed insertion attempts until no CH
// fits. If the full-set tour already fits the budget it is returned as is.
Tour orienteering_tour(const std::vector<NodeId>& chs, const Position& depot,
                       double L, double speed,
                       const std::vector<SensorNode>& nodes,
                       double dwell_s = 0.0);

// Time for the MS to visit all CHs via the TSP heuristic, at given speed.
double compute_T_L(const std::vector<NodeId>& all_chs, const Position& depot,
                   const std::vector<SensorNode>& nodes, double speed);

// CSV: seq,ch_id,x,y,leg_length_m rows plus a trailing summary line.
void export_tour_csv(const Tour& tour, const std::vector<SensorNode>& nodes,
                     const std::string& path);

}  // namespace msgather
