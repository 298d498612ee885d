#include "msgather/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "msgather/util.hpp"

namespace msgather {

namespace fs = std::filesystem;

ScenarioGrid ScenarioGrid::from_config(const NetworkConfig& cfg) {
  ScenarioGrid g;
  g.modes = cfg.grid_modes;
  g.n_values = cfg.grid_n_values;
  g.l_fractions = cfg.grid_l_fractions;
  g.theta_values = cfg.grid_theta_values;
  g.repeats = cfg.grid_repeats;
  return g;
}

void ScenarioGrid::validate() const {
  if (modes.empty() || n_values.empty() || l_fractions.empty() ||
      theta_values.empty())
    throw ConfigError("scenario grid lists must be non-empty");
  if (repeats < 1) throw ConfigError("scenario grid repeats must be >= 1");
}

double variance_of_residual(const std::vector<SensorNode>& nodes) {
  // Welford over alive nodes; population variance.
  long count = 0;
  double mean = 0.0, m2 = 0.0;
  for (const auto& sn : nodes) {
    if (!sn.alive()) continue;
    ++count;
    const double delta = sn.residual_energy - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (sn.residual_energy - mean);
  }
  if (count == 0)
    throw ProtocolError("variance_of_residual with no alive nodes");
  return m2 / static_cast<double>(count);
}

std::uint64_t derive_seed(std::uint64_t base_seed, Mode mode, int n,
                          double l_fraction, double theta, int repeat) {
  auto bits = [](double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    return u;
  };
  std::uint64_t h = base_seed;
  h = mix_seed(h, static_cast<std::uint64_t>(mode) + 1);
  h = mix_seed(h, static_cast<std::uint64_t>(n));
  h = mix_seed(h, bits(l_fraction));
  h = mix_seed(h, bits(theta));
  h = mix_seed(h, static_cast<std::uint64_t>(repeat) + 1);
  return h;
}

namespace {

std::string cell_file_name(const RunResult& r) {
  std::ostringstream s;
  s << "run_" << to_string(r.mode) << "_n" << r.n << "_L"
    << static_cast<long>(std::llround(r.l_fraction * 1e6)) << "_t"
    << static_cast<long>(std::llround(r.theta * 1e3)) << "_r" << r.repeat
    << ".csv";
  return s.str();
}

std::string result_row(const RunResult& r) {
  std::ostringstream s;
  s << to_string(r.mode) << ',' << r.n << ',' << fmt_double(r.l_fraction)
    << ',' << fmt_double(r.theta) << ',' << r.seed << ','
    << fmt_double(r.summary.lifetime_s) << ',' << r.summary.rounds << ','
    << r.summary.reclusterings << ',' << r.summary.delivered << ','
    << r.summary.stranded << ',' << fmt_double(r.summary.T_L_initial_s) << ','
    << r.summary.num_chs_initial;
  return s.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

RunResult parse_result_row(const std::string& line) {
  const auto f = split_csv(line);
  if (f.size() < 12) throw ConfigError("malformed results row: " + line);
  RunResult r;
  r.mode = mode_from_string(f[0]);
  r.n = std::stoi(f[1]);
  r.l_fraction = std::stod(f[2]);
  r.theta = std::stod(f[3]);
  r.seed = std::stoull(f[4]);
  r.summary.lifetime_s = std::stod(f[5]);
  r.summary.rounds = std::stol(f[6]);
  r.summary.reclusterings = std::stoi(f[7]);
  r.summary.delivered = std::stol(f[8]);
  r.summary.stranded = std::stol(f[9]);
  r.summary.T_L_initial_s = std::stod(f[10]);
  r.summary.num_chs_initial = std::stoi(f[11]);
  if (f.size() > 12) r.repeat = std::stoi(f[12]);
  if (f.size() > 13) r.hash = std::stoull(f[13], nullptr, 16);
  return r;
}

// Cell files carry the results row plus repeat and trace hash so resumed
// grids stay bit-identical.
void write_cell_file(const fs::path& dir, const RunResult& r) {
  std::ofstream out(dir / cell_file_name(r));
  if (!out) throw ConfigError("cannot write cell file in " + dir.string());
  out << result_row(r) << ',' << r.repeat << ',' << hex_u64(r.hash) << '\n';
  for (const auto& [t, v] : r.variance_series)
    out << "v," << fmt_double(t) << ',' << fmt_double(v) << '\n';
}

bool load_cell_file(const fs::path& dir, RunResult& r) {
  std::ifstream in(dir / cell_file_name(r));
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line)) return false;
  try {
    RunResult parsed = parse_result_row(line);
    parsed.failed = false;
    while (std::getline(in, line)) {
      const auto f = split_csv(line);
      if (f.size() == 3 && f[0] == "v")
        parsed.variance_series.emplace_back(std::stod(f[1]), std::stod(f[2]));
    }
    r = parsed;
    return true;
  } catch (const std::exception&) {
    return false;  // corrupt cell file: recompute
  }
}

}  // namespace

std::vector<RunResult> run_grid(const ScenarioGrid& grid,
                                const NetworkConfig& base, int workers,
                                const std::string& resume_dir) {
  grid.validate();
  if (workers < 1) workers = 1;

  std::vector<RunResult> results;
  for (Mode mode : grid.modes)
    for (int n : grid.n_values)
      for (double lf : grid.l_fractions)
        for (double theta : grid.theta_values)
          for (int rep = 0; rep < grid.repeats; ++rep) {
            RunResult r;
            r.mode = mode;
            r.n = n;
            r.l_fraction = lf;
            r.theta = theta;
            r.repeat = rep;
            r.seed = derive_seed(base.rng_seed, mode, n, lf, theta, rep);
            results.push_back(r);
          }

  const bool resume = !resume_dir.empty();
  if (resume) fs::create_directories(resume_dir);

  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= results.size()) return;
      RunResult& r = results[i];
      if (resume) {
        std::lock_guard<std::mutex> lock(io_mutex);
        if (load_cell_file(resume_dir, r)) continue;
      }
      try {
        NetworkConfig cfg = base;
        cfg.mode = r.mode;
        cfg.n = r.n;
        cfg.l_fraction = r.l_fraction;
        cfg.l_absolute_s = 0.0;
        cfg.theta_deg = r.theta;
        cfg.rng_seed = r.seed;
        cfg.record_events = false;  // grids keep summaries, not event logs
        SimulationTrace trace = run_simulation(cfg);
        r.summary = trace.summary;
        r.hash = trace_hash(trace);
        r.variance_series = std::move(trace.variance_series);
      } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
      }
      if (resume && !r.failed) {
        std::lock_guard<std::mutex> lock(io_mutex);
        write_cell_file(resume_dir, r);
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

void write_results_csv(const std::vector<RunResult>& results,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "mode,n,L_fraction,theta,seed,lifetime_s,rounds,reclusterings,"
         "delivered,stranded,T_L_s,num_chs_initial\n";
  for (const auto& r : results) {
    if (r.failed) continue;
    out << result_row(r) << '\n';
  }
}

std::vector<RunResult> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open results file '" + path + "'");
  std::vector<RunResult> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    out.push_back(parse_result_row(line));
  }
  return out;
}

void write_variance_series_csv(const std::vector<RunResult>& results,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "mode,n,L_fraction,theta,seed,time,variance\n";
  for (const auto& r : results) {
    if (r.failed) continue;
    for (const auto& [t, v] : r.variance_series)
      out << to_string(r.mode) << ',' << r.n << ',' << fmt_double(r.l_fraction)
          << ',' << fmt_double(r.theta) << ',' << r.seed << ','
          << fmt_double(t) << ',' << fmt_double(v) << '\n';
  }
}

CellStats lifetime_stats(const std::vector<RunResult>& results, Mode mode,
                         int n, double l_fraction, double theta) {
  CellStats cs;
  cs.min = std::numeric_limits<double>::infinity();
  cs.max = -cs.min;
  double sum = 0.0, sumsq = 0.0;
  for (const auto& r : results) {
    if (r.failed || r.mode != mode || r.n != n || r.l_fraction != l_fraction ||
        r.theta != theta)
      continue;
    const double x = r.summary.lifetime_s;
    sum += x;
    sumsq += x * x;
    cs.min = std::min(cs.min, x);
    cs.max = std::max(cs.max, x);
    ++cs.count;
  }
  if (cs.count > 0) {
    cs.mean = sum / cs.count;
    const double var = std::max(0.0, sumsq / cs.count - cs.mean * cs.mean);
    cs.stddev = std::sqrt(var);
  }
  return cs;
}

namespace {

struct Key {
  Mode mode;
  int n;
  double lf;
  double theta;
  bool operator<(const Key& o) const {
    if (mode != o.mode) return mode < o.mode;
    if (n != o.n) return n < o.n;
    if (lf != o.lf) return lf < o.lf;
    return theta < o.theta;
  }
};

std::map<Key, CellStats> group_cells(const std::vector<RunResult>& results) {
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : results) {
    if (r.failed) continue;
    groups[Key{r.mode, r.n, r.l_fraction, r.theta}].push_back(
        r.summary.lifetime_s);
  }
  std::map<Key, CellStats> out;
  for (auto& [k, xs] : groups) {
    CellStats cs;
    cs.count = static_cast<int>(xs.size());
    cs.min = *std::min_element(xs.begin(), xs.end());
    cs.max = *std::max_element(xs.begin(), xs.end());
    double sum = 0.0;
    for (double x : xs) sum += x;
    cs.mean = sum / cs.count;
    double sq = 0.0;
    for (double x : xs) sq += (x - cs.mean) * (x - cs.mean);
    cs.stddev = std::sqrt(sq / cs.count);
    out.emplace(k, cs);
  }
  return out;
}

void write_family(const std::map<Key, CellStats>& cells, const fs::path& path,
                  const char* lead_cols,
                  const std::function<std::string(const Key&)>& lead) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << lead_cols << ",lifetime_mean_s,lifetime_stddev_s,lifetime_min_s,"
         "lifetime_max_s,runs\n";
  for (const auto& [k, cs] : cells)
    out << lead(k) << ',' << fmt_double(cs.mean) << ','
        << fmt_double(cs.stddev) << ',' << fmt_double(cs.min) << ','
        << fmt_double(cs.max) << ',' << cs.count << '\n';
}

}  // namespace

void emit_plots(const std::vector<RunResult>& results,
                const std::string& out_dir) {
  if (results.empty()) throw ConfigError("emit_plots: no results");
  fs::create_directories(out_dir);
  const auto cells = group_cells(results);
  const fs::path dir(out_dir);

  write_family(cells, dir / "fig_lifetime_vs_L.csv", "mode,n,theta,L_fraction",
               [](const Key& k) {
                 return to_string(k.mode) + "," + std::to_string(k.n) + "," +
                        fmt_double(k.theta) + "," + fmt_double(k.lf);
               });
  write_family(cells, dir / "fig_lifetime_vs_n.csv", "mode,L_fraction,theta,n",
               [](const Key& k) {
                 return to_string(k.mode) + "," + fmt_double(k.lf) + "," +
                        fmt_double(k.theta) + "," + std::to_string(k.n);
               });
  write_family(cells, dir / "fig_lifetime_vs_theta.csv",
               "mode,n,L_fraction,theta", [](const Key& k) {
                 return to_string(k.mode) + "," + std::to_string(k.n) + "," +
                        fmt_double(k.lf) + "," + fmt_double(k.theta);
               });

  // Mode comparison: prefix vs orienteering on matching cells.
  {
    std::ofstream out(dir / "fig_mode_comparison.csv");
    if (!out) throw ConfigError("cannot write fig_mode_comparison.csv");
    out << "n,L_fraction,theta,prefix_mean_s,orienteering_mean_s,"
           "prefix_gain_percent\n";
    for (const auto& [k, cs] : cells) {
      if (k.mode != Mode::Prefix) continue;
      auto it = cells.find(Key{Mode::Orienteering, k.n, k.lf, k.theta});
      if (it == cells.end()) continue;
      const double gain =
          it->second.mean > 0
              ? (cs.mean - it->second.mean) / it->second.mean * 100.0
              : 0.0;
      out << k.n << ',' << fmt_double(k.lf) << ',' << fmt_double(k.theta)
          << ',' << fmt_double(cs.mean) << ',' << fmt_double(it->second.mean)
          << ',' << fmt_double(gain) << '\n';
    }
  }

  // Variance over time, one row per sample, when series were retained.
  {
    std::ofstream out(dir / "fig_variance_vs_time.csv");
    if (!out) throw ConfigError("cannot write fig_variance_vs_time.csv");
    out << "mode,n,L_fraction,theta,seed,time,variance\n";
    for (const auto& r : results) {
      if (r.failed) continue;
      for (const auto& [t, v] : r.variance_series)
        out << to_string(r.mode) << ',' << r.n << ','
            << fmt_double(r.l_fraction) << ',' << fmt_double(r.theta) << ','
            << r.seed << ',' << fmt_double(t) << ',' << fmt_double(v) << '\n';
    }
  }
}

}  // namespace msgather
