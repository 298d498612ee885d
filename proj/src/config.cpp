#include "msgather/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "msgather/util.hpp"

namespace msgather {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Prefix: return "prefix";
    case Mode::Orienteering: return "orienteering";
    case Mode::Unconstrained: return "unconstrained";
  }
  return "?";
}

std::string to_string(RegionOrder o) {
  return o == RegionOrder::Cyclic ? "cyclic" : "snake";
}

Mode mode_from_string(const std::string& s) {
  if (s == "prefix") return Mode::Prefix;
  if (s == "orienteering") return Mode::Orienteering;
  if (s == "unconstrained") return Mode::Unconstrained;
  throw ConfigError("unknown mode '" + s + "'");
}

RegionOrder region_order_from_string(const std::string& s) {
  if (s == "cyclic") return RegionOrder::Cyclic;
  if (s == "snake") return RegionOrder::SnakeLike;
  throw ConfigError("unknown region order '" + s + "'");
}

void NetworkConfig::validate() const {
  if (n < 1) throw ConfigError("deploy.n must be >= 1");
  if (field_side <= 0) throw ConfigError("deploy.field_side must be > 0");
  if (radio_range_r <= 0) throw ConfigError("radio.range_r must be > 0");
  energy.validate();
  if (radio_range_r > energy.tx_dist_max_m)
    throw ConfigError("radio.range_r must not exceed energy.tx_dist_max_m");
  if (initial_energy_j <= 0) throw ConfigError("energy.initial_j must be > 0");
  if (data_bits <= 0) throw ConfigError("packet.data_bits must be > 0");
  if (control_bits <= 0) throw ConfigError("packet.control_bits must be > 0");
  if (packets_per_round_g < 1)
    throw ConfigError("packet.per_round must be >= 1");
  if (!(theta_deg > 0 && theta_deg <= 180))
    throw ConfigError("protocol.theta_deg must be in (0, 180]");
  if (mode != Mode::Unconstrained) {
    if (l_absolute_s < 0) throw ConfigError("protocol.l_absolute_s must be >= 0");
    if (l_absolute_s == 0 && l_fraction <= 0)
      throw ConfigError("protocol.l_fraction must be > 0 (or set l_absolute_s)");
  }
  if (!(reclustering_threshold > 0 && reclustering_threshold < 1))
    throw ConfigError("protocol.reclustering_threshold must be in (0,1)");
  if (dwell_s < 0) throw ConfigError("protocol.dwell_s must be >= 0");
  if (energy_levels < 0) throw ConfigError("protocol.energy_levels must be >= 0");
  if (sink_speed_s <= 0) throw ConfigError("sink.speed_mps must be > 0");
  if (lifetime_def == LifetimeDef::FractionDead &&
      !(dead_fraction_p > 0 && dead_fraction_p <= 1))
    throw ConfigError("sim.dead_fraction must be in (0,1]");
  if (variance_every_rounds < 1)
    throw ConfigError("sim.variance_every_rounds must be >= 1");
  if (max_rounds < 1) throw ConfigError("sim.max_rounds must be >= 1");
  if (grid_repeats < 1) throw ConfigError("grid.repeats must be >= 1");
  if (grid_n_values.empty() || grid_l_fractions.empty() ||
      grid_theta_values.empty() || grid_modes.empty())
    throw ConfigError("grid lists must be non-empty");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& v) {
  std::size_t pos = 0;
  double d = std::stod(v, &pos);
  if (pos != v.size()) throw ConfigError("bad number '" + v + "'");
  return d;
}

long parse_long(const std::string& v) {
  std::size_t pos = 0;
  long x = std::stol(v, &pos);
  if (pos != v.size()) throw ConfigError("bad integer '" + v + "'");
  return x;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean '" + v + "'");
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& v, F item) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw ConfigError("empty list item");
    out.push_back(item(tok));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

using Setter = std::function<void(NetworkConfig&, const std::string&)>;

const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"deploy.n", [](NetworkConfig& c, const std::string& v) { c.n = static_cast<int>(parse_long(v)); }},
      {"deploy.field_side", [](NetworkConfig& c, const std::string& v) { c.field_side = parse_double(v); }},
      {"radio.range_r", [](NetworkConfig& c, const std::string& v) { c.radio_range_r = parse_double(v); }},
      {"radio.bitrate", [](NetworkConfig& c, const std::string& v) { c.energy.bitrate_bps = parse_double(v); }},
      {"energy.initial_j", [](NetworkConfig& c, const std::string& v) { c.initial_energy_j = parse_double(v); }},
      {"energy.tx_power_min_mw", [](NetworkConfig& c, const std::string& v) { c.energy.tx_power_min_mw = parse_double(v); }},
      {"energy.tx_power_max_mw", [](NetworkConfig& c, const std::string& v) { c.energy.tx_power_max_mw = parse_double(v); }},
      {"energy.tx_dist_min_m", [](NetworkConfig& c, const std::string& v) { c.energy.tx_dist_min_m = parse_double(v); }},
      {"energy.tx_dist_max_m", [](NetworkConfig& c, const std::string& v) { c.energy.tx_dist_max_m = parse_double(v); }},
      {"energy.rx_power_mw", [](NetworkConfig& c, const std::string& v) { c.energy.rx_power_mw = parse_double(v); }},
      {"energy.sleep_power_mw", [](NetworkConfig& c, const std::string& v) { c.energy.sleep_power_mw = parse_double(v); }},
      {"packet.data_bits", [](NetworkConfig& c, const std::string& v) { c.data_bits = parse_double(v); }},
      {"packet.control_bits", [](NetworkConfig& c, const std::string& v) { c.control_bits = parse_double(v); }},
      {"packet.per_round", [](NetworkConfig& c, const std::string& v) { c.packets_per_round_g = static_cast<int>(parse_long(v)); }},
      {"protocol.mode", [](NetworkConfig& c, const std::string& v) { c.mode = mode_from_string(v); }},
      {"protocol.theta_deg", [](NetworkConfig& c, const std::string& v) { c.theta_deg = parse_double(v); }},
      {"protocol.l_fraction", [](NetworkConfig& c, const std::string& v) { c.l_fraction = parse_double(v); }},
      {"protocol.l_absolute_s", [](NetworkConfig& c, const std::string& v) { c.l_absolute_s = parse_double(v); }},
      {"protocol.reclustering_threshold", [](NetworkConfig& c, const std::string& v) { c.reclustering_threshold = parse_double(v); }},
      {"protocol.recluster_on_stranded", [](NetworkConfig& c, const std::string& v) { c.recluster_on_stranded = parse_bool(v); }},
      {"protocol.dwell_s", [](NetworkConfig& c, const std::string& v) { c.dwell_s = parse_double(v); }},
      {"protocol.energy_levels", [](NetworkConfig& c, const std::string& v) { c.energy_levels = static_cast<int>(parse_long(v)); }},
      {"sink.speed_mps", [](NetworkConfig& c, const std::string& v) { c.sink_speed_s = parse_double(v); }},
      {"sink.region_order", [](NetworkConfig& c, const std::string& v) { c.region_order = region_order_from_string(v); }},
      {"sink.relocation_travel_time", [](NetworkConfig& c, const std::string& v) { c.relocation_travel_time = parse_bool(v); }},
      {"sim.seed", [](NetworkConfig& c, const std::string& v) { c.rng_seed = static_cast<std::uint64_t>(parse_long(v)); }},
      {"sim.lifetime", [](NetworkConfig& c, const std::string& v) {
         if (v == "first_death") c.lifetime_def = LifetimeDef::FirstNodeDeath;
         else if (v == "fraction_dead") c.lifetime_def = LifetimeDef::FractionDead;
         else throw ConfigError("sim.lifetime must be first_death or fraction_dead");
       }},
      {"sim.dead_fraction", [](NetworkConfig& c, const std::string& v) { c.dead_fraction_p = parse_double(v); }},
      {"sim.record_events", [](NetworkConfig& c, const std::string& v) { c.record_events = parse_bool(v); }},
      {"sim.variance_every_rounds", [](NetworkConfig& c, const std::string& v) { c.variance_every_rounds = static_cast<int>(parse_long(v)); }},
      {"sim.max_rounds", [](NetworkConfig& c, const std::string& v) { c.max_rounds = parse_long(v); }},
      {"grid.n_values", [](NetworkConfig& c, const std::string& v) {
         c.grid_n_values = parse_list<int>(v, [](const std::string& t) { return static_cast<int>(parse_long(t)); });
       }},
      {"grid.l_fractions", [](NetworkConfig& c, const std::string& v) {
         c.grid_l_fractions = parse_list<double>(v, parse_double);
       }},
      {"grid.theta_values", [](NetworkConfig& c, const std::string& v) {
         c.grid_theta_values = parse_list<double>(v, parse_double);
       }},
      {"grid.repeats", [](NetworkConfig& c, const std::string& v) { c.grid_repeats = static_cast<int>(parse_long(v)); }},
      {"grid.modes", [](NetworkConfig& c, const std::string& v) {
         c.grid_modes = parse_list<Mode>(v, mode_from_string);
       }},
  };
  return table;
}

void apply_key(NetworkConfig& cfg, const std::string& key,
               const std::string& value) {
  auto it = key_table().find(key);
  if (it == key_table().end())
    throw ConfigError("unknown key '" + key + "'");
  it->second(cfg, value);
}

}  // namespace

NetworkConfig parse_config_text(const std::string& text,
                                const std::string& source_name) {
  NetworkConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name + ":" + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  return cfg;
}

NetworkConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_override(NetworkConfig& cfg, const std::string& key_eq_value) {
  auto eq = key_eq_value.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be key=value, got '" + key_eq_value + "'");
  const std::string key = trim(key_eq_value.substr(0, eq));
  const std::string value = trim(key_eq_value.substr(eq + 1));
  try {
    apply_key(cfg, key, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("override: ") + e.what());
  }
}

std::string dump_config(const NetworkConfig& cfg) {
  std::ostringstream out;
  out << "deploy.n = " << cfg.n << '\n';
  out << "deploy.field_side = " << fmt_double(cfg.field_side) << '\n';
  out << "radio.range_r = " << fmt_double(cfg.radio_range_r) << '\n';
  out << "radio.bitrate = " << fmt_double(cfg.energy.bitrate_bps) << '\n';
  out << "energy.initial_j = " << fmt_double(cfg.initial_energy_j) << '\n';
  out << "energy.tx_power_min_mw = " << fmt_double(cfg.energy.tx_power_min_mw) << '\n';
  out << "energy.tx_power_max_mw = " << fmt_double(cfg.energy.tx_power_max_mw) << '\n';
  out << "energy.tx_dist_min_m = " << fmt_double(cfg.energy.tx_dist_min_m) << '\n';
  out << "energy.tx_dist_max_m = " << fmt_double(cfg.energy.tx_dist_max_m) << '\n';
  out << "energy.rx_power_mw = " << fmt_double(cfg.energy.rx_power_mw) << '\n';
  out << "energy.sleep_power_mw = " << fmt_double(cfg.energy.sleep_power_mw) << '\n';
  out << "packet.data_bits = " << fmt_double(cfg.data_bits) << '\n';
  out << "packet.control_bits = " << fmt_double(cfg.control_bits) << '\n';
  out << "packet.per_round = " << cfg.packets_per_round_g << '\n';
  out << "protocol.mode = " << to_string(cfg.mode) << '\n';
  out << "protocol.theta_deg = " << fmt_double(cfg.theta_deg) << '\n';
  out << "protocol.l_fraction = " << fmt_double(cfg.l_fraction) << '\n';
  out << "protocol.l_absolute_s = " << fmt_double(cfg.l_absolute_s) << '\n';
  out << "protocol.reclustering_threshold = "
      << fmt_double(cfg.reclustering_threshold) << '\n';
  out << "protocol.recluster_on_stranded = "
      << (cfg.recluster_on_stranded ? "true" : "false") << '\n';
  out << "protocol.dwell_s = " << fmt_double(cfg.dwell_s) << '\n';
  out << "protocol.energy_levels = " << cfg.energy_levels << '\n';
  out << "sink.speed_mps = " << fmt_double(cfg.sink_speed_s) << '\n';
  out << "sink.region_order = " << to_string(cfg.region_order) << '\n';
  out << "sink.relocation_travel_time = "
      << (cfg.relocation_travel_time ? "true" : "false") << '\n';
  out << "sim.seed = " << cfg.rng_seed << '\n';
  out << "sim.lifetime = "
      << (cfg.lifetime_def == LifetimeDef::FirstNodeDeath ? "first_death"
                                                          : "fraction_dead")
      << '\n';
  out << "sim.dead_fraction = " << fmt_double(cfg.dead_fraction_p) << '\n';
  out << "sim.record_events = " << (cfg.record_events ? "true" : "false")
      << '\n';
  out << "sim.variance_every_rounds = " << cfg.variance_every_rounds << '\n';
  out << "sim.max_rounds = " << cfg.max_rounds << '\n';
  auto join_d = [](const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i)
      s += (i ? "," : "") + fmt_double(xs[i]);
    return s;
  };
  std::string ns;
  for (std::size_t i = 0; i < cfg.grid_n_values.size(); ++i)
    ns += (i ? "," : "") + std::to_string(cfg.grid_n_values[i]);
  std::string modes;
  for (std::size_t i = 0; i < cfg.grid_modes.size(); ++i)
    modes += (i ? "," : "") + to_string(cfg.grid_modes[i]);
  out << "grid.n_values = " << ns << '\n';
  out << "grid.l_fractions = " << join_d(cfg.grid_l_fractions) << '\n';
  out << "grid.theta_values = " << join_d(cfg.grid_theta_values) << '\n';
  out << "grid.repeats = " << cfg.grid_repeats << '\n';
  out << "grid.modes = " << modes << '\n';
  return out.str();
}

}  // namespace msgather
