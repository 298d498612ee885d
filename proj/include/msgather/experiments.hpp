#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msgather/config.hpp"
#include "msgather/engine.hpp"

namespace msgather {

struct ScenarioGrid {
  std::vector<Mode> modes{Mode::Prefix};
  std::vector<int> n_values{400, 600, 800, 1000};
  std::vector<double> l_fractions{0.05, 0.1, 0.25, 0.5};
  std::vector<double> theta_values{45.0, 60.0, 67.5, 75.0, 90.0};
  int repeats = 5;

  static ScenarioGrid from_config(const NetworkConfig& cfg);
  void validate() const;
};

struct RunResult {
  Mode mode = Mode::Prefix;
  int n = 0;
  double l_fraction = 0.0;
  double theta = 0.0;
  std::uint64_t seed = 0;
  int repeat = 0;
  bool failed = false;
  std::string error;
  RunSummary summary;
  std::uint64_t hash = 0;
  std::vector<std::pair<double, double>> variance_series;
};

// Pure function of the base seed and the cell coordinates (values, not
// indices), so any cell can be reproduced in isolation.
std::uint64_t derive_seed(std::uint64_t base_seed, Mode mode, int n,
                          double l_fraction, double theta, int repeat);

// Population variance of residual energy over alive nodes. Throws
// ProtocolError when nothing is alive (the run is over at that point).
double variance_of_residual(const std::vector<SensorNode>& nodes);

// Runs one simulation per (mode, n, L, theta, repeat). Results are merged
// in cell order regardless of worker count. If resume_dir is non-empty,
// per-run result files are written there and existing ones are loaded
// instead of recomputed. Per-run failures are recorded, not fatal.
std::vector<RunResult> run_grid(const ScenarioGrid& grid,
                                const NetworkConfig& base, int workers = 1,
                                const std::string& resume_dir = "");

// results CSV: mode,n,L_fraction,theta,seed,lifetime_s,rounds,reclusterings,
// delivered,stranded,T_L_s,num_chs_initial
void write_results_csv(const std::vector<RunResult>& results,
                       const std::string& path);
std::vector<RunResult> read_results_csv(const std::string& path);

void write_variance_series_csv(const std::vector<RunResult>& results,
                               const std::string& path);

// One plain-column data file per figure family (lifetime vs L / n / theta,
// mode comparison, variance over time). Pure function of the results rows;
// regeneration is byte-identical.
void emit_plots(const std::vector<RunResult>& results,
                const std::string& out_dir);

struct CellStats {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

CellStats lifetime_stats(const std::vector<RunResult>& results, Mode mode,
                         int n, double l_fraction, double theta);

}  // namespace msgather
