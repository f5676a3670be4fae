#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wpmec/channel.hpp"
#include "wpmec/model.hpp"

namespace wpmec {

/// Parsed instance description: system constants plus per-device lists.
/// Lists other than `distances` may be empty, meaning homogeneous defaults.
struct InstanceConfig {
  SystemParams params;
  std::vector<double> distances;
  std::vector<double> weights;
  std::vector<double> k_effs;
  std::vector<double> cycles_per_bit;
  std::vector<double> residual_energies;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw ValidationError("config: key '" + key + "' has non-numeric value '" + t + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, key));
  if (out.empty()) throw ValidationError("config: key '" + key + "' has an empty list");
  return out;
}

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline const char* cap_rule_name(PowerCapRule rule) {
  return rule == PowerCapRule::PhysicalMin ? "physical_min" : "paper_literal_max";
}

/// Parses the flat key-value config format: `key = value` lines, `#`
/// comments. Keys are the SystemParams field names plus the per-device
/// lists (comma separated). Unknown or repeated keys are errors.
inline InstanceConfig parse_config_text(const std::string& text) {
  InstanceConfig cfg;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw ValidationError("config: key '" + key + "' given more than once");

    if (key == "p0") cfg.params.p0 = detail::parse_number(value, key);
    else if (key == "nu") cfg.params.nu = detail::parse_number(value, key);
    else if (key == "t_frame") cfg.params.t_frame = detail::parse_number(value, key);
    else if (key == "bandwidth") cfg.params.bandwidth = detail::parse_number(value, key);
    else if (key == "spreading_gain") cfg.params.spreading_gain = detail::parse_number(value, key);
    else if (key == "noise_n0") cfg.params.noise_n0 = detail::parse_number(value, key);
    else if (key == "q_max") cfg.params.q_max = detail::parse_number(value, key);
    else if (key == "carrier_freq") cfg.params.carrier_freq = detail::parse_number(value, key);
    else if (key == "antenna_gain") cfg.params.antenna_gain = detail::parse_number(value, key);
    else if (key == "path_loss_exp") cfg.params.path_loss_exp = detail::parse_number(value, key);
    else if (key == "power_cap_rule") {
      if (value == "physical_min") cfg.params.power_cap_rule = PowerCapRule::PhysicalMin;
      else if (value == "paper_literal_max") cfg.params.power_cap_rule = PowerCapRule::PaperLiteralMax;
      else
        throw ValidationError("config: power_cap_rule must be 'physical_min' or "
                              "'paper_literal_max', got '" + value + "'");
    }
    else if (key == "distances") cfg.distances = detail::parse_list(value, key);
    else if (key == "weights") cfg.weights = detail::parse_list(value, key);
    else if (key == "k_effs") cfg.k_effs = detail::parse_list(value, key);
    else if (key == "cycles_per_bit") cfg.cycles_per_bit = detail::parse_list(value, key);
    else if (key == "residual_energies") cfg.residual_energies = detail::parse_list(value, key);
    else
      throw ValidationError("config: unknown key '" + key + "'");
  }
  cfg.params.validate();
  if (cfg.distances.empty())
    throw ValidationError("config: 'distances' is required (one entry per device)");
  return cfg;
}

inline InstanceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

/// Materializes the device list, default-filling the optional per-device
/// columns (w=1, k=1e-26, C=100, e=0).
inline std::vector<Device> build_devices(const InstanceConfig& cfg) {
  const std::size_t n = cfg.distances.size();
  auto filled = [n](const std::vector<double>& v, double dflt) {
    return v.empty() ? std::vector<double>(n, dflt) : v;
  };
  return build_instance(cfg.params, cfg.distances, filled(cfg.weights, 1.0),
                        filled(cfg.k_effs, 1e-26), filled(cfg.cycles_per_bit, 100.0),
                        filled(cfg.residual_energies, 0.0));
}

/// Config-format rendering of the resolved parameter set, used for the
/// metadata companion files.
inline std::string format_params(const SystemParams& p) {
  std::string out;
  out += "p0 = " + detail::fmt_g17(p.p0) + "\n";
  out += "nu = " + detail::fmt_g17(p.nu) + "\n";
  out += "t_frame = " + detail::fmt_g17(p.t_frame) + "\n";
  out += "bandwidth = " + detail::fmt_g17(p.bandwidth) + "\n";
  out += "spreading_gain = " + detail::fmt_g17(p.spreading_gain) + "\n";
  out += "noise_n0 = " + detail::fmt_g17(p.noise_n0) + "\n";
  out += "q_max = " + detail::fmt_g17(p.q_max) + "\n";
  out += "carrier_freq = " + detail::fmt_g17(p.carrier_freq) + "\n";
  out += "antenna_gain = " + detail::fmt_g17(p.antenna_gain) + "\n";
  out += "path_loss_exp = " + detail::fmt_g17(p.path_loss_exp) + "\n";
  out += std::string("power_cap_rule = ") + cap_rule_name(p.power_cap_rule) + "\n";
  return out;
}

inline std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += detail::fmt_g17(v[i]);
  }
  return out;
}

}  // namespace wpmec
