#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msgather/energy.hpp"
#include "msgather/types.hpp"

namespace msgather {

enum class Mode : std::uint8_t { Prefix, Orienteering, Unconstrained };
enum class LifetimeDef : std::uint8_t { FirstNodeDeath, FractionDead };

std::string to_string(Mode m);
std::string to_string(RegionOrder o);
Mode mode_from_string(const std::string& s);
RegionOrder region_order_from_string(const std::string& s);

struct NetworkConfig {
  // deployment
  int n = 400;
  double field_side = 500.0;

  // radio
  double radio_range_r = 45.0;

  EnergyModelParams energy;
  double initial_energy_j = 500.0;

  // packets
  double data_bits = 1000.0;
  double control_bits = 128.0;
  int packets_per_round_g = 1;

  // protocol
  Mode mode = Mode::Prefix;
  double theta_deg = 70.0;
  double l_fraction = 0.1;     // L = l_fraction * T_L of the first epoch
  double l_absolute_s = 0.0;   // if > 0, overrides l_fraction
  double reclustering_threshold = 0.1;  // fraction in (0,1)
  bool recluster_on_stranded = false;
  double dwell_s = 0.0;  // pickup stop per visited CH
  // Formation broadcasts carry the residual energy as a finite message
  // field: initial_energy_j / energy_levels is the advertised step.
  // 0 disables quantization (exact values on the air).
  int energy_levels = 64;

  // mobile sink
  double sink_speed_s = 1.0;
  RegionOrder region_order = RegionOrder::Cyclic;
  // When false, MS relocation between regions takes no simulated wall time
  // (the travel interval is negligible against epochs at full battery
  // scale; at small desk energies it otherwise pads the clock).
  bool relocation_travel_time = true;

  // simulation
  std::uint64_t rng_seed = 1;
  LifetimeDef lifetime_def = LifetimeDef::FirstNodeDeath;
  double dead_fraction_p = 0.1;  // used when lifetime_def == FractionDead
  bool record_events = true;
  int variance_every_rounds = 1;
  long max_rounds = 5'000'000;

  // grid sweep (used by the grid subcommand)
  std::vector<int> grid_n_values{400, 600, 800, 1000};
  std::vector<double> grid_l_fractions{0.05, 0.1, 0.25, 0.5};
  std::vector<double> grid_theta_values{45.0, 60.0, 67.5, 75.0, 90.0};
  int grid_repeats = 5;
  std::vector<Mode> grid_modes{Mode::Prefix};

  void validate() const;  // throws ConfigError
};

// Flat dotted-key config format ("radio.range_r = 45"). Unknown keys are
// errors; messages carry the offending line number.
NetworkConfig parse_config_text(const std::string& text,
                                const std::string& source_name = "<config>");
NetworkConfig load_config_file(const std::string& path);
void apply_override(NetworkConfig& cfg, const std::string& key_eq_value);
std::string dump_config(const NetworkConfig& cfg);

}  // namespace msgather
