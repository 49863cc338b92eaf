#include "sudas/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sudas/errors.hpp"

namespace sudas {

ConfigEntries parse_config_text(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  ConfigEntries out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "' must be inside a section");
    for (const auto& [key, value] : body) out.emplace_back(section + "." + key, value.data());
  }
  return out;
}

ConfigEntries load_config_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::optional<std::string> find_entry(const ConfigEntries& entries, const std::string& key) {
  std::optional<std::string> v;
  for (const auto& [k, val] : entries)
    if (k == key) v = val;
  return v;
}

namespace {

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t')) --e;
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || b == e)
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  return v;
}

std::size_t to_count(const std::string& key, const std::string& s) {
  const double v = to_double(key, s);
  if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
    throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<double> per_ue(const std::string& key, const std::string& s, std::size_t k) {
  std::vector<double> v = to_list(key, s);
  if (v.size() == 1) v.assign(k, v[0]);
  if (v.size() != k)
    throw ConfigError(key + ": expected 1 or " + std::to_string(k) + " values, got " +
                      std::to_string(v.size()));
  return v;
}

std::vector<double> dbm_list(std::vector<double> v) {
  for (double& x : v) x = dbm_to_watt(x);
  return v;
}

}  // namespace

void apply_config(const ConfigEntries& entries, ExperimentSpec& spec) {
  SystemConfig& c = spec.base;
  ChannelModel& ch = c.channel;
  SolverOptions& so = spec.solver;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto real = [](double& f) -> Setter { return [&f](const auto& k, const auto& v) { f = to_double(k, v); }; };
  auto dbm = [](double& f) -> Setter {
    return [&f](const auto& k, const auto& v) { f = dbm_to_watt(to_double(k, v)); };
  };
  auto count = [](std::size_t& f) -> Setter {
    return [&f](const auto& k, const auto& v) { f = to_count(k, v); };
  };
  auto ues = [&c](std::vector<double>& f, bool in_dbm) -> Setter {
    return [&c, &f, in_dbm](const auto& k, const auto& v) {
      f = per_ue(k, v, c.n_ues);
      if (in_dbm) f = dbm_list(f);
    };
  };

  const std::map<std::string, Setter> setters = {
      {"system.n_antennas", count(c.n_antennas)},
      {"system.n_sudacs", count(c.n_sudacs)},
      {"system.n_ues", [](const auto&, const auto&) {}},  // applied first
      {"system.n_subcarriers", count(c.n_subcarriers)},
      {"system.n_streams_cap", count(c.n_streams_cap)},
      {"system.subcarrier_bandwidth_hz", real(c.subcarrier_bandwidth_hz)},
      {"power.p_bs_max", real(c.p_bs_max)},
      {"power.p_bs_max_dbm", dbm(c.p_bs_max)},
      {"power.p_sudac_dl_max", real(c.p_sudac_dl_max)},
      {"power.p_sudac_dl_max_dbm", dbm(c.p_sudac_dl_max)},
      {"power.p_sudas_ul_max", real(c.p_sudas_ul_max)},
      {"power.p_sudas_ul_max_dbm", dbm(c.p_sudas_ul_max)},
      {"power.p_ue_max", ues(c.p_ue_max, false)},
      {"power.p_ue_max_dbm", ues(c.p_ue_max, true)},
      {"rates.r_min_dl", ues(c.r_min_dl, false)},
      {"rates.r_min_ul", ues(c.r_min_ul, false)},
      {"circuit.p_circuit_bs", real(c.p_circuit_bs)},
      {"circuit.p_antenna_bs", real(c.p_antenna_bs)},
      {"circuit.p_circuit_sudac", real(c.p_circuit_sudac)},
      {"circuit.p_circuit_ue", real(c.p_circuit_ue)},
      {"amplifier.eps_bs", real(c.eps_bs)},
      {"amplifier.eps_sudas", real(c.eps_sudas)},
      {"amplifier.eps_ue", ues(c.eps_ue, false)},
      {"channel.noise_psd_dbm_hz", real(ch.noise_psd_dbm_hz)},
      {"channel.licensed_noise_figure_db", real(ch.licensed_noise_figure_db)},
      {"channel.unlicensed_noise_figure_db", real(ch.unlicensed_noise_figure_db)},
      {"channel.bs_distance_m", real(ch.bs_distance_m)},
      {"channel.bs_pathloss_ref_db", real(ch.bs_pathloss_ref_db)},
      {"channel.bs_pathloss_exponent", real(ch.bs_pathloss_exponent)},
      {"channel.bs_extra_loss_db", real(ch.bs_extra_loss_db)},
      {"channel.sudac_distance_m", real(ch.sudac_distance_m)},
      {"channel.sudac_pathloss_ref_db", real(ch.sudac_pathloss_ref_db)},
      {"channel.sudac_pathloss_exponent", real(ch.sudac_pathloss_exponent)},
      {"channel.sudac_antenna_gain_db", real(ch.sudac_antenna_gain_db)},
      {"channel.rician_k_db", real(ch.rician_k_db)},
      {"channel.freq_correlation", real(ch.freq_correlation)},
      {"channel.fading", [&ch](const auto& k, const auto& v) { ch.fading = to_bool(k, v); }},
      {"solver.eta_tolerance", real(so.eta_tolerance)},
      {"solver.max_outer", count(so.max_outer)},
      {"solver.max_inner", count(so.max_inner)},
      {"solver.max_iterations", count(so.max_iterations)},
      {"solver.inner_tolerance", real(so.inner_tolerance)},
      {"solver.max_bracket_steps", count(so.max_bracket_steps)},
      {"experiment.preset", [](const auto&, const auto&) {}},  // chosen by the caller
      {"experiment.sweep", [&spec](const auto&, const auto& v) { spec.sweep = parse_sweep_var(v); }},
      {"experiment.values", [&spec](const auto& k, const auto& v) { spec.values = to_list(k, v); }},
      {"experiment.trials", count(spec.trials)},
      {"experiment.seed",
       [&spec](const auto& k, const auto& v) {
         std::uint64_t s = 0;
         const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
         if (ec != std::errc() || p != v.data() + v.size())
           throw ConfigError(k + ": expected an unsigned integer, got '" + v + "'");
         spec.master_seed = s;
       }},
      {"experiment.systems", [&spec](const auto&, const auto& v) { spec.systems = parse_systems(v); }},
      {"experiment.out", [&spec](const auto&, const auto& v) { spec.output_dir = v; }},
      {"experiment.workers", count(spec.workers)},
  };

  for (const auto& [key, value] : entries)
    if (!setters.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  if (const auto k = find_entry(entries, "system.n_ues")) c.resize_ues(to_count("system.n_ues", *k));
  for (const auto& [key, value] : entries) {
    try {
      setters.at(key)(key, value);
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.rfind(key, 0) == 0) throw;
      throw ConfigError(key + ": " + msg);
    }
  }
}

}  // namespace sudas
