#include "msgather/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "msgather/experiments.hpp"
#include "msgather/util.hpp"

namespace msgather {

namespace {

constexpr int kMaxRegionsPerAxis = 16;

int axis_count(double side, double extent) {
  if (!(extent > 0.0)) return 1;
  const int m = static_cast<int>(std::lround(side / extent));
  return std::clamp(m, 1, kMaxRegionsPerAxis);
}

}  // namespace

RegionPlan make_region_plan(double field_side, double region_w, double region_h,
                            RegionOrder order) {
  RegionPlan plan;
  plan.order = order;
  plan.cols = axis_count(field_side, region_w);
  plan.rows = axis_count(field_side, region_h);
  plan.region_w = field_side / plan.cols;
  plan.region_h = field_side / plan.rows;

  // Row-major grid, row 0 at the top (largest y).
  std::vector<Position> grid;
  grid.reserve(static_cast<std::size_t>(plan.cols) * plan.rows);
  for (int r = 0; r < plan.rows; ++r)
    for (int c = 0; c < plan.cols; ++c)
      grid.push_back(Position{(c + 0.5) * plan.region_w,
                              field_side - (r + 0.5) * plan.region_h});

  if (order == RegionOrder::SnakeLike) {
    // Left to right on even rows, right to left on odd, top to bottom.
    for (int r = 0; r < plan.rows; ++r) {
      if (r % 2 == 0) {
        for (int c = 0; c < plan.cols; ++c)
          plan.centers.push_back(grid[r * plan.cols + c]);
      } else {
        for (int c = plan.cols - 1; c >= 0; --c)
          plan.centers.push_back(grid[r * plan.cols + c]);
      }
    }
  } else {
    // Cyclic: start at the region holding the field center, then sweep
    // outward; equal radii ordered by angle from east, counter-clockwise.
    const Position mid{field_side / 2.0, field_side / 2.0};
    std::vector<std::size_t> idx(grid.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double da = distance(grid[a], mid), db = distance(grid[b], mid);
      if (da != db) return da < db;
      double aa = std::atan2(grid[a].y - mid.y, grid[a].x - mid.x);
      double ab = std::atan2(grid[b].y - mid.y, grid[b].x - mid.x);
      if (aa < 0) aa += 2.0 * 3.14159265358979323846;
      if (ab < 0) ab += 2.0 * 3.14159265358979323846;
      if (aa != ab) return aa < ab;
      return a < b;
    });
    for (std::size_t i : idx) plan.centers.push_back(grid[i]);
  }
  return plan;
}

Simulation::Simulation(const NetworkConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  nodes_ = deploy(cfg_);
  ledger_.reset(nodes_.size(), cfg_.record_events);
  ms_.initial_pos = Position{cfg_.field_side / 2.0, cfg_.field_side / 2.0};
  ms_.current_pos = ms_.initial_pos;
  ms_.region_order = cfg_.region_order;
  plan_.order = cfg_.region_order;
}

double Simulation::cluster_avg_residual(ClusterId c) const {
  const auto& roster = forest_.members.at(c);
  double sum = 0.0;
  for (NodeId m : roster) sum += nodes_[m].residual_energy;
  return sum / static_cast<double>(roster.size());
}

void Simulation::debit_sleep_interval(double duration) {
  if (duration <= 0.0) return;
  const double amount = sleep_energy_j(duration, cfg_.energy);
  if (amount <= 0.0) return;
  for (auto& sn : nodes_)
    if (sn.alive())
      ledger_.debit(sn, clock_, EventKind::Sleep, amount, "sleep");
}

void Simulation::record_variance_sample() {
  std::size_t alive = 0;
  for (const auto& sn : nodes_) alive += sn.alive();
  if (alive == 0) return;
  variance_series_.emplace_back(clock_, variance_of_residual(nodes_));
}

void Simulation::establish_epoch() {
  const DirectionParams dir{cfg_.theta_deg, ms_.current_pos};
  const double quantum =
      cfg_.energy_levels > 0 ? cfg_.initial_energy_j / cfg_.energy_levels : 0.0;

  if (cfg_.mode == Mode::Unconstrained)
    forest_ = initial_cluster_formation(nodes_, cfg_.radio_range_r, ledger_,
                                        cfg_.energy, cfg_.control_bits, clock_,
                                        quantum);
  else
    forest_ = ms_oriented_cluster_formation(nodes_, cfg_.radio_range_r, dir,
                                            ledger_, cfg_.energy,
                                            cfg_.control_bits, clock_, quantum);

  flood_ch_locations(forest_, nodes_, cfg_.radio_range_r, ledger_, cfg_.energy,
                     cfg_.control_bits, clock_);

  const double T_L = compute_T_L(forest_.heads, ms_.current_pos, nodes_,
                                 cfg_.sink_speed_s);
  if (epoch_index_ == 0) {
    T_L_initial_ = T_L;
    if (cfg_.mode == Mode::Unconstrained)
      L_effective_ = 0.0;
    else
      L_effective_ = cfg_.l_absolute_s > 0 ? cfg_.l_absolute_s
                                           : cfg_.l_fraction * T_L_initial_;
  }

  switch (cfg_.mode) {
    case Mode::Unconstrained:
      tour_ = find_tsp_route(ms_.current_pos, forest_.heads, nodes_,
                             cfg_.sink_speed_s);
      break;
    case Mode::Prefix: {
      const auto sorted =
          sort_chs_by_distance(forest_.heads, nodes_, ms_.current_pos);
      tour_ = build_ms_tour(sorted, ms_.current_pos, L_effective_,
                            cfg_.sink_speed_s, nodes_, cfg_.dwell_s);
      break;
    }
    case Mode::Orienteering:
      tour_ = orienteering_tour(forest_.heads, ms_.current_pos, L_effective_,
                                cfg_.sink_speed_s, nodes_, cfg_.dwell_s);
      break;
  }

  tour_chs_.clear();
  tour_chs_.insert(tour_.visit_order.begin(), tour_.visit_order.end());

  // Round-robin rings: alive in-direction neighbors in other clusters,
  // known from the formation broadcasts of this epoch.
  forwarders_.clear();
  const auto adj = build_adjacency(nodes_, cfg_.radio_range_r);
  for (NodeId h : forest_.heads) {
    ForwarderState st;
    if (nodes_[h].alive()) {
      for (NodeId v : adj[h]) {
        if (!forest_.cluster_of[v] ||
            *forest_.cluster_of[v] == *forest_.cluster_of[h])
          continue;
        if (!in_direction(nodes_[h].pos, nodes_[v].pos, dir)) continue;
        st.ring.push_back(v);
      }
    }
    forwarders_.emplace(h, std::move(st));
  }

  baseline_.clear();
  for (const auto& [cid, roster] : forest_.members)
    baseline_[cid] = cluster_avg_residual(cid);

  EpochReport er;
  er.epoch = epoch_index_;
  er.start_time = clock_;
  er.anchor = ms_.current_pos;
  er.num_chs = static_cast<int>(forest_.heads.size());
  er.tour_chs = static_cast<int>(tour_.visit_order.size());
  er.tour_time_s = tour_.travel_time_s;
  er.T_L_s = T_L;
  er.degenerate_tour = tour_.budget_warning;
  epochs_.push_back(er);
}

bool Simulation::check_reclustering(
    const std::vector<NodeId>& flagged_chs) const {
  return !flagged_chs.empty();
}

void Simulation::relocate_ms() {
  // Region extent from the bounding box of the nodes in the tour clusters;
  // the whole-network box stands in when the tour is degenerate.
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_y;
  bool any = false;
  auto include = [&](const Position& p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
    any = true;
  };
  for (NodeId ch : tour_chs_) {
    auto it = forest_.members.find(ch);
    if (it == forest_.members.end()) continue;
    for (NodeId m : it->second) include(nodes_[m].pos);
  }
  if (!any)
    for (const auto& sn : nodes_)
      if (sn.alive()) include(sn.pos);

  const double w = any ? (max_x - min_x) : cfg_.field_side;
  const double h = any ? (max_y - min_y) : cfg_.field_side;
  const long cursor = plan_.cursor;
  plan_ = make_region_plan(cfg_.field_side, w, h, cfg_.region_order);
  plan_.cursor = cursor;

  const std::size_t m = plan_.centers.size();
  const std::size_t idx = static_cast<std::size_t>(plan_.cursor % m);
  plan_.cursor += 1;
  const Position target = plan_.centers[idx];

  if (cfg_.relocation_travel_time) {
    const double travel =
        distance(ms_.current_pos, target) / cfg_.sink_speed_s;
    clock_ += travel;
    debit_sleep_interval(travel);
  }
  ms_.current_pos = target;
  ms_.region_index = static_cast<int>(idx);
}

std::vector<NodeId> Simulation::route_data_packet(Packet& pkt, NodeId start,
                                                  DeliveryOutcome& out) {
  // Climb the parent chain from `start`, debiting each hop; returns the
  // trail. out.delivered is left untouched; out.strand is set on a break.
  std::vector<NodeId> trail{start};
  NodeId w = start;
  while (forest_.parent[w]) {
    const NodeId p = *forest_.parent[w];
    if (!nodes_[w].alive()) {
      out.strand = StrandReason::DeadRelay;
      return trail;
    }
    const double d = distance(nodes_[w].pos, nodes_[p].pos);
    ledger_.debit(nodes_[w], clock_, EventKind::Tx,
                  tx_energy_j(pkt.size_bits, d, cfg_.energy), "data");
    ++out.hops;
    if (!nodes_[p].alive()) {
      out.strand = StrandReason::DeadRelay;
      return trail;
    }
    ledger_.debit(nodes_[p], clock_, EventKind::Rx,
                  rx_energy_j(pkt.size_bits, cfg_.energy), "data");
    trail.push_back(p);
    pkt.hop_trace.push_back(p);
    w = p;
  }
  return trail;
}

void Simulation::send_member_report(NodeId member) {
  NodeId w = member;
  while (forest_.parent[w]) {
    const NodeId p = *forest_.parent[w];
    if (!nodes_[w].alive()) return;  // report lost at the break
    const double d = distance(nodes_[w].pos, nodes_[p].pos);
    ledger_.debit(nodes_[w], clock_, EventKind::Tx,
                  tx_energy_j(cfg_.control_bits, d, cfg_.energy), "report");
    if (!nodes_[p].alive()) return;
    ledger_.debit(nodes_[p], clock_, EventKind::Rx,
                  rx_energy_j(cfg_.control_bits, cfg_.energy), "report");
    w = p;
  }
}

RoundReport Simulation::run_round() {
  RoundReport rr;
  rr.round = round_index_;
  rr.epoch = epoch_index_;
  rr.t_start = clock_;

  const double duration = tour_.visit_order.empty()
                              ? std::max(L_effective_, 1.0)
                              : tour_time_with_dwell(tour_, cfg_.dwell_s);

  std::map<NodeId, OriginRoundStat> origin_stats;
  for (NodeId h : forest_.heads) {
    OriginRoundStat s;
    s.round = round_index_;
    s.origin_ch = h;
    origin_stats.emplace(h, s);
  }

  std::map<NodeId, std::vector<Packet>> buffers;

  // Sensing phase: every node alive at round start emits g packets along
  // its upstream path; members also report residual energy to their CH.
  std::vector<NodeId> senders;
  for (const auto& sn : nodes_)
    if (sn.alive() && forest_.cluster_of[sn.id]) senders.push_back(sn.id);

  std::vector<std::pair<Packet, NodeId>> stranded_packets;  // with origin CH
  for (NodeId u : senders) {
    const ClusterId cid = *forest_.cluster_of[u];
    auto& stat = origin_stats.at(cid);
    for (int k = 0; k < cfg_.packets_per_round_g; ++k) {
      Packet pkt;
      pkt.origin = u;
      pkt.seq = next_seq_++;
      pkt.size_bits = cfg_.data_bits;
      pkt.hop_trace.push_back(u);
      ++stat.generated;
      ++rr.generated;
      if (!nodes_[u].alive()) {
        // Drained earlier this round while relaying.
        ++stat.stranded;
        ++rr.stranded;
        rr.stranded_flag = true;
        continue;
      }
      DeliveryOutcome out;
      route_data_packet(pkt, u, out);
      stat.hops_total += out.hops;
      rr.hops_total += out.hops;
      if (out.strand != StrandReason::None) {
        ++stat.stranded;
        ++rr.stranded;
        rr.stranded_flag = true;
      } else {
        buffers[pkt.hop_trace.back()].push_back(std::move(pkt));
      }
    }
    if (forest_.parent[u] && nodes_[u].alive()) send_member_report(u);
  }

  // Forwarding phase: CHs off the tour push their buffers toward the MS
  // route in a round-robin manner.
  ForwardingContext ctx;
  ctx.nodes = &nodes_;
  ctx.forest = &forest_;
  ctx.forwarders = &forwarders_;
  ctx.tour_chs = &tour_chs_;
  ctx.ledger = &ledger_;
  ctx.energy = &cfg_.energy;
  ctx.time = clock_;

  for (NodeId h : forest_.heads) {
    if (tour_chs_.count(h)) continue;
    auto it = buffers.find(h);
    if (it == buffers.end()) continue;
    std::vector<Packet> pending = std::move(it->second);
    buffers.erase(it);
    for (auto& pkt : pending) {
      const ClusterId oc = *forest_.cluster_of[pkt.origin];
      auto& stat = origin_stats.at(oc);
      if (!nodes_[h].alive()) {
        ++stat.stranded;
        ++rr.stranded;
        rr.stranded_flag = true;
        continue;
      }
      DeliveryOutcome out = forward_to_ms(pkt, h, ctx);
      stat.hops_total += out.hops;
      rr.hops_total += out.hops;
      if (out.delivered) {
        buffers[out.buffered_at].push_back(std::move(pkt));
      } else {
        ++stat.stranded;
        ++rr.stranded;
        rr.stranded_flag = true;
      }
    }
  }

  // Traversal phase: the MS walks the tour, picking up buffers and
  // below-threshold flags at each stop.
  flagged_last_round_.clear();
  double t_move = clock_;
  Position at = ms_.current_pos;
  for (NodeId ch : tour_.visit_order) {
    t_move += distance(at, nodes_[ch].pos) / cfg_.sink_speed_s;
    at = nodes_[ch].pos;
    auto it = buffers.find(ch);
    if (nodes_[ch].alive()) {
      if (it != buffers.end()) {
        for (auto& pkt : it->second) {
          auto& stat = origin_stats.at(*forest_.cluster_of[pkt.origin]);
          if (!nodes_[ch].alive()) {  // drained mid-pickup
            ++stat.stranded;
            ++rr.stranded;
            rr.stranded_flag = true;
            continue;
          }
          ledger_.debit(nodes_[ch], t_move, EventKind::Tx,
                        tx_energy_j(pkt.size_bits, 0.0, cfg_.energy), "upload");
          ++stat.delivered;
          ++rr.delivered;
          ++bs_uploads_;
        }
        buffers.erase(it);
      }
      // Reclustering criterion, evaluated against the epoch baseline.
      const double base = baseline_.at(ch);
      const double cur = cluster_avg_residual(ch);
      if (base > 0.0 && (base - cur) / base > cfg_.reclustering_threshold) {
        flagged_last_round_.push_back(ch);
        if (nodes_[ch].alive())
          ledger_.debit(nodes_[ch], t_move, EventKind::Tx,
                        tx_energy_j(cfg_.control_bits, 0.0, cfg_.energy),
                        "flag");
      }
    } else if (it != buffers.end()) {
      for (auto& pkt : it->second) {
        auto& stat = origin_stats.at(*forest_.cluster_of[pkt.origin]);
        ++stat.stranded;
        ++rr.stranded;
      }
      rr.stranded_flag = true;
      buffers.erase(it);
    }
    t_move += cfg_.dwell_s;
  }

  // Anything still buffered sat at a CH the tour never reached (can only
  // be packets that strand-landed on a dead tour CH edge case).
  for (auto& [ch, pkts] : buffers) {
    for (auto& pkt : pkts) {
      auto& stat = origin_stats.at(*forest_.cluster_of[pkt.origin]);
      ++stat.stranded;
      ++rr.stranded;
    }
    if (!pkts.empty()) rr.stranded_flag = true;
  }
  buffers.clear();

  rr.below_threshold_flags = static_cast<int>(flagged_last_round_.size());

  // The round occupies the tour's wall time; idle listening is folded into
  // sleep power over that interval.
  clock_ += duration;
  rr.t_end = clock_;
  debit_sleep_interval(duration);

  ++round_index_;
  if (round_index_ % cfg_.variance_every_rounds == 0)
    record_variance_sample();

  for (const auto& [cid, stat] : origin_stats) per_origin_.push_back(stat);
  rounds_.push_back(rr);
  return rr;
}

bool Simulation::lifetime_reached() const {
  if (cfg_.lifetime_def == LifetimeDef::FirstNodeDeath)
    return ledger_.deaths() >= 1;
  const auto needed = static_cast<std::size_t>(
      std::ceil(cfg_.dead_fraction_p * static_cast<double>(nodes_.size())));
  return ledger_.deaths() >= std::max<std::size_t>(needed, 1);
}

bool Simulation::all_dead() const {
  for (const auto& sn : nodes_)
    if (sn.alive()) return false;
  return true;
}

SimulationTrace Simulation::run() {
  establish_epoch();
  record_variance_sample();

  while (!lifetime_reached() && !all_dead() &&
         round_index_ < cfg_.max_rounds) {
    run_round();
    if (lifetime_reached() || all_dead()) break;
    const bool trigger =
        check_reclustering(flagged_last_round_) ||
        (cfg_.recluster_on_stranded && rounds_.back().stranded_flag);
    if (trigger) {
      rounds_.back().recluster_triggered = true;
      ++reclusterings_;
      ++epoch_index_;
      relocate_ms();
      establish_epoch();
    }
  }

  SimulationTrace trace;
  trace.rounds = std::move(rounds_);
  trace.per_origin = std::move(per_origin_);
  trace.epochs = std::move(epochs_);
  trace.variance_series = std::move(variance_series_);

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double dt = ledger_.death_time(static_cast<NodeId>(i));
    if (!std::isnan(dt))
      trace.deaths.push_back(DeathRecord{static_cast<NodeId>(i), dt});
  }
  std::sort(trace.deaths.begin(), trace.deaths.end(),
            [](const DeathRecord& a, const DeathRecord& b) {
              if (a.time != b.time) return a.time < b.time;
              return a.node < b.node;
            });

  RunSummary& s = trace.summary;
  s.rounds = static_cast<long>(trace.rounds.size());
  s.epochs = epoch_index_ + 1;
  s.reclusterings = reclusterings_;
  for (const auto& r : trace.rounds) {
    s.generated += r.generated;
    s.delivered += r.delivered;
    s.stranded += r.stranded;
  }
  s.bs_uploads = bs_uploads_;
  s.T_L_initial_s = T_L_initial_;
  s.L_effective_s = L_effective_;
  s.num_chs_initial = trace.epochs.empty() ? 0 : trace.epochs.front().num_chs;
  if (!trace.deaths.empty()) s.first_death = trace.deaths.front();

  if (cfg_.lifetime_def == LifetimeDef::FirstNodeDeath) {
    s.lifetime_s = trace.deaths.empty() ? clock_ : trace.deaths.front().time;
  } else {
    const auto needed = std::max<std::size_t>(
        static_cast<std::size_t>(std::ceil(cfg_.dead_fraction_p *
                                           static_cast<double>(nodes_.size()))),
        1);
    s.lifetime_s = trace.deaths.size() >= needed
                       ? trace.deaths[needed - 1].time
                       : clock_;
  }

  trace.final_nodes = nodes_;
  trace.ledger = std::move(ledger_);
  return trace;
}

SimulationTrace run_simulation(const NetworkConfig& cfg) {
  Simulation sim(cfg);
  return sim.run();
}

std::uint64_t trace_hash(const SimulationTrace& trace) {
  Fnv1a h;
  for (const auto& r : trace.rounds) {
    h.add_i64(r.round);
    h.add_i64(r.epoch);
    h.add_double(r.t_start);
    h.add_double(r.t_end);
    h.add_i64(r.generated);
    h.add_i64(r.delivered);
    h.add_i64(r.stranded);
    h.add_i64(r.hops_total);
    h.add_i64(r.below_threshold_flags);
    h.add_u64(r.recluster_triggered);
  }
  for (const auto& e : trace.epochs) {
    h.add_i64(e.epoch);
    h.add_double(e.start_time);
    h.add_double(e.anchor.x);
    h.add_double(e.anchor.y);
    h.add_i64(e.num_chs);
    h.add_i64(e.tour_chs);
    h.add_double(e.tour_time_s);
  }
  for (const auto& d : trace.deaths) {
    h.add_i64(d.node);
    h.add_double(d.time);
  }
  for (const auto& sn : trace.final_nodes) h.add_double(sn.residual_energy);
  h.add_double(trace.summary.lifetime_s);
  h.add_i64(trace.summary.delivered);
  h.add_i64(trace.summary.stranded);
  return h.value();
}

void export_rounds_csv(const SimulationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "round,epoch,t_start,t_end,generated,delivered,stranded,hops_total,"
         "below_threshold_flags,stranded_flag,recluster_triggered\n";
  for (const auto& r : trace.rounds)
    out << r.round << ',' << r.epoch << ',' << fmt_double(r.t_start) << ','
        << fmt_double(r.t_end) << ',' << r.generated << ',' << r.delivered
        << ',' << r.stranded << ',' << r.hops_total << ','
        << r.below_threshold_flags << ',' << (r.stranded_flag ? 1 : 0) << ','
        << (r.recluster_triggered ? 1 : 0) << '\n';
}

void export_per_origin_csv(const SimulationTrace& trace,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "round,origin,generated,delivered,stranded,hops_total\n";
  for (const auto& s : trace.per_origin)
    out << s.round << ',' << s.origin_ch << ',' << s.generated << ','
        << s.delivered << ',' << s.stranded << ',' << s.hops_total << '\n';
}

void export_epochs_csv(const SimulationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "epoch,start_time,anchor_x,anchor_y,num_chs,tour_chs,tour_time_s,"
         "T_L_s,degenerate\n";
  for (const auto& e : trace.epochs)
    out << e.epoch << ',' << fmt_double(e.start_time) << ','
        << fmt_double(e.anchor.x) << ',' << fmt_double(e.anchor.y) << ','
        << e.num_chs << ',' << e.tour_chs << ',' << fmt_double(e.tour_time_s)
        << ',' << fmt_double(e.T_L_s) << ',' << (e.degenerate_tour ? 1 : 0)
        << '\n';
}

void export_summary_csv(const SimulationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  const RunSummary& s = trace.summary;
  out << "lifetime_s,rounds,epochs,reclusterings,generated,delivered,stranded,"
         "bs_uploads,T_L_initial_s,L_effective_s,num_chs_initial,first_death_"
         "node,first_death_time,trace_hash\n";
  out << fmt_double(s.lifetime_s) << ',' << s.rounds << ',' << s.epochs << ','
      << s.reclusterings << ',' << s.generated << ',' << s.delivered << ','
      << s.stranded << ',' << s.bs_uploads << ','
      << fmt_double(s.T_L_initial_s) << ',' << fmt_double(s.L_effective_s)
      << ',' << s.num_chs_initial << ',';
  if (s.first_death) out << s.first_death->node;
  out << ',';
  if (s.first_death) out << fmt_double(s.first_death->time);
  out << ',' << hex_u64(trace_hash(trace)) << '\n';
}

}  // namespace msgather
