#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "msgather/clustering.hpp"
#include "msgather/config.hpp"
#include "msgather/core.hpp"
#include "msgather/energy.hpp"
#include "msgather/engine.hpp"
#include "msgather/experiments.hpp"
#include "msgather/forwarding.hpp"
#include "msgather/tour.hpp"

namespace py = pybind11;
using namespace msgather;

namespace {

// Clustering in one call for scripting: copies the node list, charges the
// control traffic to a scratch ledger, and returns the forest together
// with the post-formation nodes and the total control energy spent.
py::tuple cluster_py(std::vector<SensorNode> nodes, double R,
                     std::optional<double> theta, std::optional<Position> ms,
                     double control_bits, double energy_quantum) {
  EnergyLedger ledger(nodes.size(), false);
  EnergyModelParams params;
  ClusterForest forest;
  if (theta && ms) {
    DirectionParams dir{*theta, *ms};
    forest = ms_oriented_cluster_formation(nodes, R, dir, ledger, params,
                                           control_bits, 0.0, energy_quantum);
  } else {
    forest = initial_cluster_formation(nodes, R, ledger, params, control_bits,
                                       0.0, energy_quantum);
  }
  return py::make_tuple(forest, nodes, ledger.total_debited());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Simulator and protocol library for energy-aware data gathering in "
      "wireless sensor networks with a path-constrained mobile sink";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<LookupError>(m, "NodeLookupError");
  py::register_exception<GeometryError>(m, "GeometryError");
  py::register_exception<RoutingError>(m, "RoutingError");
  py::register_exception<ProtocolError>(m, "ProtocolError");

  py::class_<Position>(m, "Position")
      .def(py::init<>())
      .def(py::init([](double x, double y) { return Position{x, y}; }),
           py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Position::x)
      .def_readwrite("y", &Position::y)
      .def("__repr__", [](const Position& p) {
        return "Position(" + std::to_string(p.x) + ", " + std::to_string(p.y) +
               ")";
      });
  m.def("distance", &distance, py::arg("a"), py::arg("b"));

  py::enum_<Role>(m, "Role")
      .value("Member", Role::Member)
      .value("ClusterHead", Role::ClusterHead);

  py::class_<SensorNode>(m, "SensorNode")
      .def(py::init<>())
      .def_readwrite("id", &SensorNode::id)
      .def_readwrite("pos", &SensorNode::pos)
      .def_readwrite("residual_energy", &SensorNode::residual_energy)
      .def_readwrite("role", &SensorNode::role)
      .def_readwrite("parent", &SensorNode::parent)
      .def_readwrite("cluster", &SensorNode::cluster)
      .def("alive", &SensorNode::alive);

  py::class_<EnergyModelParams>(m, "EnergyModelParams")
      .def(py::init<>())
      .def_readwrite("tx_power_min_mw", &EnergyModelParams::tx_power_min_mw)
      .def_readwrite("tx_power_max_mw", &EnergyModelParams::tx_power_max_mw)
      .def_readwrite("tx_dist_min_m", &EnergyModelParams::tx_dist_min_m)
      .def_readwrite("tx_dist_max_m", &EnergyModelParams::tx_dist_max_m)
      .def_readwrite("rx_power_mw", &EnergyModelParams::rx_power_mw)
      .def_readwrite("sleep_power_mw", &EnergyModelParams::sleep_power_mw)
      .def_readwrite("bitrate_bps", &EnergyModelParams::bitrate_bps);

  m.def("tx_power_mw", &tx_power_mw, py::arg("d"),
        py::arg("params") = EnergyModelParams{});
  m.def("tx_energy_j", &tx_energy_j, py::arg("packet_bits"), py::arg("d"),
        py::arg("params") = EnergyModelParams{});
  m.def("rx_energy_j", &rx_energy_j, py::arg("packet_bits"),
        py::arg("params") = EnergyModelParams{});
  m.def("sleep_energy_j", &sleep_energy_j, py::arg("duration_s"),
        py::arg("params") = EnergyModelParams{});

  py::enum_<Mode>(m, "Mode")
      .value("Prefix", Mode::Prefix)
      .value("Orienteering", Mode::Orienteering)
      .value("Unconstrained", Mode::Unconstrained);

  py::enum_<RegionOrder>(m, "RegionOrder")
      .value("Cyclic", RegionOrder::Cyclic)
      .value("SnakeLike", RegionOrder::SnakeLike);

  py::class_<NetworkConfig>(m, "NetworkConfig")
      .def(py::init<>())
      .def_readwrite("n", &NetworkConfig::n)
      .def_readwrite("field_side", &NetworkConfig::field_side)
      .def_readwrite("radio_range_r", &NetworkConfig::radio_range_r)
      .def_readwrite("energy", &NetworkConfig::energy)
      .def_readwrite("initial_energy_j", &NetworkConfig::initial_energy_j)
      .def_readwrite("data_bits", &NetworkConfig::data_bits)
      .def_readwrite("control_bits", &NetworkConfig::control_bits)
      .def_readwrite("packets_per_round_g", &NetworkConfig::packets_per_round_g)
      .def_readwrite("mode", &NetworkConfig::mode)
      .def_readwrite("theta_deg", &NetworkConfig::theta_deg)
      .def_readwrite("l_fraction", &NetworkConfig::l_fraction)
      .def_readwrite("l_absolute_s", &NetworkConfig::l_absolute_s)
      .def_readwrite("reclustering_threshold",
                     &NetworkConfig::reclustering_threshold)
      .def_readwrite("recluster_on_stranded",
                     &NetworkConfig::recluster_on_stranded)
      .def_readwrite("dwell_s", &NetworkConfig::dwell_s)
      .def_readwrite("energy_levels", &NetworkConfig::energy_levels)
      .def_readwrite("sink_speed_s", &NetworkConfig::sink_speed_s)
      .def_readwrite("region_order", &NetworkConfig::region_order)
      .def_readwrite("relocation_travel_time",
                     &NetworkConfig::relocation_travel_time)
      .def_readwrite("rng_seed", &NetworkConfig::rng_seed)
      .def_readwrite("record_events", &NetworkConfig::record_events)
      .def_readwrite("variance_every_rounds",
                     &NetworkConfig::variance_every_rounds)
      .def_readwrite("max_rounds", &NetworkConfig::max_rounds)
      .def("validate", &NetworkConfig::validate);

  m.def("parse_config_text", &parse_config_text, py::arg("text"),
        py::arg("source_name") = "<config>");
  m.def("load_config_file", &load_config_file, py::arg("path"));
  m.def("apply_override", &apply_override, py::arg("config"),
        py::arg("key_eq_value"));
  m.def("dump_config", &dump_config, py::arg("config"));

  m.def("deploy", &deploy, py::arg("config"));
  m.def("neighbors", &neighbors, py::arg("node"), py::arg("nodes"),
        py::arg("R"));

  py::class_<DirectionParams>(m, "DirectionParams")
      .def(py::init([](double theta, Position ms) {
             return DirectionParams{theta, ms};
           }),
           py::arg("theta_deg"), py::arg("ms_pos"))
      .def_readwrite("theta_deg", &DirectionParams::theta_deg)
      .def_readwrite("ms_pos", &DirectionParams::ms_pos);

  m.def(
      "in_direction",
      [](const Position& sn, const Position& v, const Position& ms,
         double theta) {
        return in_direction(sn, v, DirectionParams{theta, ms});
      },
      py::arg("sn"), py::arg("v"), py::arg("ms"), py::arg("theta_deg"));

  py::class_<ClusterForest>(m, "ClusterForest")
      .def_readonly("parent", &ClusterForest::parent)
      .def_readonly("heads", &ClusterForest::heads)
      .def_readonly("cluster_of", &ClusterForest::cluster_of)
      .def_readonly("members", &ClusterForest::members)
      .def_readonly("formation_energy", &ClusterForest::formation_energy)
      .def("is_head", &ClusterForest::is_head)
      .def("alive_count", &ClusterForest::alive_count);

  m.def("cluster", &cluster_py, py::arg("nodes"), py::arg("R"),
        py::arg("theta_deg") = py::none(), py::arg("ms_pos") = py::none(),
        py::arg("control_bits") = 128.0, py::arg("energy_quantum") = 0.0,
        "Run cluster formation on a copy of the node list; returns "
        "(forest, nodes_after, control_energy_j). Pass theta_deg and ms_pos "
        "for the MS-oriented variant.");

  py::class_<Tour>(m, "Tour")
      .def_readonly("depot", &Tour::depot)
      .def_readonly("visit_order", &Tour::visit_order)
      .def_readonly("length_m", &Tour::length_m)
      .def_readonly("travel_time_s", &Tour::travel_time_s)
      .def_readonly("budget_warning", &Tour::budget_warning);

  m.def("sort_chs_by_distance", &sort_chs_by_distance, py::arg("chs"),
        py::arg("nodes"), py::arg("ms_pos"));
  m.def("find_tsp_route", &find_tsp_route, py::arg("depot"), py::arg("chs"),
        py::arg("nodes"), py::arg("speed"));
  m.def("build_ms_tour", &build_ms_tour, py::arg("sorted_chs"),
        py::arg("depot"), py::arg("L"), py::arg("speed"), py::arg("nodes"),
        py::arg("dwell_s") = 0.0);
  m.def("orienteering_tour", &orienteering_tour, py::arg("chs"),
        py::arg("depot"), py::arg("L"), py::arg("speed"), py::arg("nodes"),
        py::arg("dwell_s") = 0.0);
  m.def("compute_T_L", &compute_T_L, py::arg("all_chs"), py::arg("depot"),
        py::arg("nodes"), py::arg("speed"));

  py::class_<RoundReport>(m, "RoundReport")
      .def_readonly("round", &RoundReport::round)
      .def_readonly("epoch", &RoundReport::epoch)
      .def_readonly("t_start", &RoundReport::t_start)
      .def_readonly("t_end", &RoundReport::t_end)
      .def_readonly("generated", &RoundReport::generated)
      .def_readonly("delivered", &RoundReport::delivered)
      .def_readonly("stranded", &RoundReport::stranded)
      .def_readonly("hops_total", &RoundReport::hops_total)
      .def_readonly("below_threshold_flags", &RoundReport::below_threshold_flags)
      .def_readonly("recluster_triggered", &RoundReport::recluster_triggered);

  py::class_<EpochReport>(m, "EpochReport")
      .def_readonly("epoch", &EpochReport::epoch)
      .def_readonly("start_time", &EpochReport::start_time)
      .def_readonly("anchor", &EpochReport::anchor)
      .def_readonly("num_chs", &EpochReport::num_chs)
      .def_readonly("tour_chs", &EpochReport::tour_chs)
      .def_readonly("tour_time_s", &EpochReport::tour_time_s)
      .def_readonly("T_L_s", &EpochReport::T_L_s)
      .def_readonly("degenerate_tour", &EpochReport::degenerate_tour);

  py::class_<DeathRecord>(m, "DeathRecord")
      .def_readonly("node", &DeathRecord::node)
      .def_readonly("time", &DeathRecord::time);

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("lifetime_s", &RunSummary::lifetime_s)
      .def_readonly("rounds", &RunSummary::rounds)
      .def_readonly("epochs", &RunSummary::epochs)
      .def_readonly("reclusterings", &RunSummary::reclusterings)
      .def_readonly("generated", &RunSummary::generated)
      .def_readonly("delivered", &RunSummary::delivered)
      .def_readonly("stranded", &RunSummary::stranded)
      .def_readonly("bs_uploads", &RunSummary::bs_uploads)
      .def_readonly("T_L_initial_s", &RunSummary::T_L_initial_s)
      .def_readonly("L_effective_s", &RunSummary::L_effective_s)
      .def_readonly("num_chs_initial", &RunSummary::num_chs_initial)
      .def_readonly("first_death", &RunSummary::first_death);

  py::class_<SimulationTrace>(m, "SimulationTrace")
      .def_readonly("summary", &SimulationTrace::summary)
      .def_readonly("rounds", &SimulationTrace::rounds)
      .def_readonly("epochs", &SimulationTrace::epochs)
      .def_readonly("deaths", &SimulationTrace::deaths)
      .def_readonly("variance_series", &SimulationTrace::variance_series)
      .def_readonly("final_nodes", &SimulationTrace::final_nodes);

  m.def("run_simulation", &run_simulation, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("trace_hash", &trace_hash, py::arg("trace"));

  m.def("variance_of_residual", &variance_of_residual, py::arg("nodes"));
  m.def("derive_seed", &derive_seed, py::arg("base_seed"), py::arg("mode"),
        py::arg("n"), py::arg("l_fraction"), py::arg("theta"),
        py::arg("repeat"));

  py::class_<ScenarioGrid>(m, "ScenarioGrid")
      .def(py::init<>())
      .def_readwrite("modes", &ScenarioGrid::modes)
      .def_readwrite("n_values", &ScenarioGrid::n_values)
      .def_readwrite("l_fractions", &ScenarioGrid::l_fractions)
      .def_readwrite("theta_values", &ScenarioGrid::theta_values)
      .def_readwrite("repeats", &ScenarioGrid::repeats);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("mode", &RunResult::mode)
      .def_readonly("n", &RunResult::n)
      .def_readonly("l_fraction", &RunResult::l_fraction)
      .def_readonly("theta", &RunResult::theta)
      .def_readonly("seed", &RunResult::seed)
      .def_readonly("repeat", &RunResult::repeat)
      .def_readonly("failed", &RunResult::failed)
      .def_readonly("error", &RunResult::error)
      .def_readonly("summary", &RunResult::summary)
      .def_readonly("hash", &RunResult::hash)
      .def_readonly("variance_series", &RunResult::variance_series);

  m.def("run_grid", &run_grid, py::arg("grid"), py::arg("base"),
        py::arg("workers") = 1, py::arg("resume_dir") = "",
        py::call_guard<py::gil_scoped_release>());
}
