#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msgather/config.hpp"
#include "msgather/engine.hpp"
#include "msgather/experiments.hpp"
#include "msgather/util.hpp"

namespace fs = std::filesystem;
using namespace msgather;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  long seed = -1;
  int workers = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "config file (dotted-key text)");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--override", o.overrides, "key=value, applied after the file")
      ->take_all();
  cmd->add_option("--seed", o.seed, "shorthand for sim.seed");
  cmd->add_option("--workers", o.workers, "parallel workers (grid only)");
}

NetworkConfig effective_config(const CommonOpts& o) {
  NetworkConfig cfg;
  if (!o.config_path.empty()) cfg = load_config_file(o.config_path);
  for (const auto& ov : o.overrides) apply_override(cfg, ov);
  if (o.seed >= 0) cfg.rng_seed = static_cast<std::uint64_t>(o.seed);
  cfg.validate();
  return cfg;
}

// Every artifact is reproducible from this dump alone.
void dump_effective(const NetworkConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / "effective_config.txt");
  out << dump_config(cfg);
}

int cmd_simulate(const CommonOpts& o) {
  const NetworkConfig cfg = effective_config(o);
  const fs::path dir(o.out_dir);
  dump_effective(cfg, dir);

  Simulation sim(cfg);
  SimulationTrace trace = sim.run();

  export_summary_csv(trace, (dir / "summary.csv").string());
  export_rounds_csv(trace, (dir / "rounds.csv").string());
  export_per_origin_csv(trace, (dir / "rounds_delivery.csv").string());
  export_epochs_csv(trace, (dir / "epochs.csv").string());
  if (trace.ledger.records_events())
    trace.ledger.export_csv((dir / "events.csv").string());
  {
    std::ofstream vs(dir / "variance.csv");
    vs << "time,variance\n";
    for (const auto& [t, v] : trace.variance_series)
      vs << fmt_double(t) << ',' << fmt_double(v) << '\n';
  }

  // First-epoch structure for inspection.
  {
    NetworkConfig probe = cfg;
    probe.record_events = false;
    Simulation fresh(probe);
    fresh.establish_epoch();
    export_forest_csv(fresh.forest(), (dir / "forest.csv").string());
    export_tour_csv(fresh.tour(), fresh.nodes(), (dir / "tour.csv").string());
  }

  std::cout << "lifetime_s=" << fmt_double(trace.summary.lifetime_s)
            << " rounds=" << trace.summary.rounds
            << " reclusterings=" << trace.summary.reclusterings
            << " delivered=" << trace.summary.delivered
            << " stranded=" << trace.summary.stranded
            << " trace_hash=" << hex_u64(trace_hash(trace)) << '\n';
  return 0;
}

int cmd_grid(const CommonOpts& o) {
  const NetworkConfig cfg = effective_config(o);
  const fs::path dir(o.out_dir);
  dump_effective(cfg, dir);

  const ScenarioGrid grid = ScenarioGrid::from_config(cfg);
  const auto results =
      run_grid(grid, cfg, o.workers, (dir / "cells").string());

  write_results_csv(results, (dir / "results.csv").string());
  write_variance_series_csv(results, (dir / "variance_series.csv").string());

  int failed = 0;
  for (const auto& r : results)
    if (r.failed) {
      ++failed;
      std::cerr << "run failed: mode=" << to_string(r.mode) << " n=" << r.n
                << " L=" << r.l_fraction << " theta=" << r.theta
                << " seed=" << r.seed << ": " << r.error << '\n';
    }
  std::cout << "grid complete: " << results.size() - failed << '/'
            << results.size() << " runs ok, results in "
            << (dir / "results.csv").string() << '\n';
  return 0;
}

int cmd_plots(const CommonOpts& o) {
  const fs::path dir(o.out_dir);
  auto results = read_results_csv((dir / "results.csv").string());

  // Reattach variance series if the grid wrote them.
  const fs::path series = dir / "variance_series.csv";
  if (fs::exists(series)) {
    std::ifstream in(series);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string mode, n, lf, theta, seed, t, v;
      std::getline(ss, mode, ',');
      std::getline(ss, n, ',');
      std::getline(ss, lf, ',');
      std::getline(ss, theta, ',');
      std::getline(ss, seed, ',');
      std::getline(ss, t, ',');
      std::getline(ss, v, ',');
      for (auto& r : results) {
        if (to_string(r.mode) == mode && std::to_string(r.n) == n &&
            r.seed == std::stoull(seed)) {
          r.variance_series.emplace_back(std::stod(t), std::stod(v));
          break;
        }
      }
    }
  }

  emit_plots(results, (dir / "plots").string());
  std::cout << "plot data written to " << (dir / "plots").string() << '\n';
  return 0;
}

int cmd_validate(const CommonOpts& o) {
  const NetworkConfig cfg = effective_config(o);
  std::cout << dump_config(cfg);
  if (!o.out_dir.empty()) dump_effective(cfg, fs::path(o.out_dir));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware data gathering simulator for sensor networks "
               "with a path-constrained mobile sink"};
  app.require_subcommand(1);

  CommonOpts sim_o, grid_o, plots_o, val_o;
  auto* sim = app.add_subcommand("simulate", "run one simulation");
  add_common(sim, sim_o);
  auto* grid = app.add_subcommand("grid", "run a scenario sweep");
  add_common(grid, grid_o);
  auto* plots = app.add_subcommand("plots", "emit plot data from results.csv");
  add_common(plots, plots_o);
  auto* val = app.add_subcommand("validate", "check a config and echo it");
  add_common(val, val_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_o);
    if (grid->parsed()) return cmd_grid(grid_o);
    if (plots->parsed()) return cmd_plots(plots_o);
    if (val->parsed()) return cmd_validate(val_o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
