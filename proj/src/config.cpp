// SPDX-License-Identifier: Apache-2.0

#include "fdpa/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fdpa/units.hpp"

namespace fdpa {

namespace {

double target_at(const std::vector<double>& targets, int i, const char* what) {
  if (targets.empty()) throw std::out_of_range(std::string(what) + " empty");
  if (targets.size() == 1) return targets[0];
  return targets.at(static_cast<std::size_t>(i));
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_double_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  for (double d : parse_double_list(v)) out.push_back(static_cast<int>(d));
  return out;
}

}  // namespace

double SystemConfig::sinr_target_dl_linear(int k) const {
  return db_to_linear(target_at(sinr_target_dl, k, "sinr_target_dl"));
}

double SystemConfig::sinr_target_ul_linear(int j) const {
  return db_to_linear(target_at(sinr_target_ul, j, "sinr_target_ul"));
}

double SystemConfig::noise_dl_watts() const { return dbm_to_watts(noise_power_dl); }

double SystemConfig::noise_ul_watts() const { return dbm_to_watts(noise_power_ul); }

std::vector<std::string> validate(const SystemConfig& cfg) {
  std::vector<std::string> errors;
  auto bad = [&](const std::string& msg) { errors.push_back(msg); };

  if (cfg.num_antennas < 1) bad("num_antennas: N_T >= 1 violated");
  if (cfg.num_dl_users < 1) bad("num_dl_users: K >= 1 violated");
  if (cfg.num_ul_users < 0) bad("num_ul_users: J >= 0 violated");
  if (cfg.num_antennas < cfg.num_ul_users)
    bad("num_antennas/num_ul_users: N_T >= J violated");
  if (!(cfg.reference_distance < cfg.max_distance))
    bad("reference_distance/max_distance: reference_distance < max_distance violated");
  if (!(cfg.reference_distance > 0))
    bad("reference_distance: must be positive");
  if (!(cfg.carrier_frequency > 0)) bad("carrier_frequency: must be positive");
  if (!(cfg.pathloss_exponent > 0)) bad("pathloss_exponent: must be positive");

  auto check_finite = [&](double v, const char* name) {
    if (!std::isfinite(v)) bad(std::string(name) + ": not finite");
  };
  check_finite(cfg.si_cancellation, "si_cancellation");
  check_finite(cfg.noise_power_dl, "noise_power_dl");
  check_finite(cfg.noise_power_ul, "noise_power_ul");
  check_finite(cfg.antenna_gain, "antenna_gain");
  check_finite(cfg.rician_factor, "rician_factor");

  if (cfg.sinr_target_dl.empty() || !all_finite(cfg.sinr_target_dl))
    bad("sinr_target_dl: must be non-empty and finite");
  if (cfg.sinr_target_ul.empty() || !all_finite(cfg.sinr_target_ul))
    bad("sinr_target_ul: must be non-empty and finite");
  // dB targets are finite, so the linear-scale values are automatically > 0;
  // repeated here to keep the contract explicit when a parser changes.
  for (double g : cfg.sinr_target_dl)
    if (std::isfinite(g) && db_to_linear(g) <= 0)
      bad("sinr_target_dl: linear-scale target must be > 0");

  if (!(cfg.sinr_target_dl.size() == 1 ||
        static_cast<int>(cfg.sinr_target_dl.size()) == cfg.num_dl_users))
    bad("sinr_target_dl: size must be 1 or K");
  if (!(cfg.sinr_target_ul.size() == 1 ||
        static_cast<int>(cfg.sinr_target_ul.size()) == cfg.num_ul_users))
    bad("sinr_target_ul: size must be 1 or J");
  return errors;
}

std::vector<std::string> validate(const SweepConfig& cfg) {
  std::vector<std::string> errors;
  if (!(cfg.lambda_step > 0 && cfg.lambda_step <= 1.0))
    errors.push_back("lambda_step: must lie in (0, 1]");
  else {
    double n = 1.0 / cfg.lambda_step;
    if (std::abs(n - std::round(n)) > 1e-9 * n)
      errors.push_back("lambda_step: must divide 1 into an integer grid");
  }
  if (cfg.num_drops < 1) errors.push_back("num_drops: must be >= 1");
  if (cfg.nt_list.empty()) errors.push_back("nt_list: must be non-empty");
  return errors;
}

void apply_config_key(SystemConfig& sys, SweepConfig& sweep,
                      const std::string& key, const std::string& value) {
  try {
    if (key == "carrier_frequency") sys.carrier_frequency = std::stod(value);
    else if (key == "bandwidth") sys.bandwidth = std::stod(value);
    else if (key == "pathloss_exponent") sys.pathloss_exponent = std::stod(value);
    else if (key == "reference_distance") sys.reference_distance = std::stod(value);
    else if (key == "max_distance") sys.max_distance = std::stod(value);
    else if (key == "si_cancellation") sys.si_cancellation = std::stod(value);
    else if (key == "noise_power_dl") sys.noise_power_dl = std::stod(value);
    else if (key == "noise_power_ul") sys.noise_power_ul = std::stod(value);
    else if (key == "antenna_gain") sys.antenna_gain = std::stod(value);
    else if (key == "rician_factor") sys.rician_factor = std::stod(value);
    else if (key == "num_antennas") sys.num_antennas = std::stoi(value);
    else if (key == "num_dl_users") sys.num_dl_users = std::stoi(value);
    else if (key == "num_ul_users") sys.num_ul_users = std::stoi(value);
    else if (key == "sinr_target_dl") sys.sinr_target_dl = parse_double_list(value);
    else if (key == "sinr_target_ul") sys.sinr_target_ul = parse_double_list(value);
    else if (key == "lambda_step") sweep.lambda_step = std::stod(value);
    else if (key == "num_drops") sweep.num_drops = std::stoi(value);
    else if (key == "master_seed") sweep.master_seed = std::stoull(value);
    else if (key == "nt_list") sweep.nt_list = parse_int_list(value);
    else if (key == "sinr_dl_sweep") sweep.sinr_dl_sweep = parse_double_list(value);
    else throw ConfigError{"unknown configuration key '" + key + "'"};
  } catch (const std::invalid_argument&) {
    throw ConfigError{"invalid value '" + value + "' for key '" + key + "'"};
  } catch (const std::out_of_range&) {
    throw ConfigError{"value '" + value + "' out of range for key '" + key + "'"};
  }
}

void load_config_stream(std::istream& in, SystemConfig& sys, SweepConfig& sweep,
                        const std::string& origin) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError{origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value'"};
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    apply_config_key(sys, sweep, key, value);
  }
}

void load_config_file(const std::string& path, SystemConfig& sys,
                      SweepConfig& sweep) {
  std::ifstream in(path);
  if (!in) throw ConfigError{"cannot open config file '" + path + "'"};
  load_config_stream(in, sys, sweep, path);
}

std::string dump_config(const SystemConfig& sys, const SweepConfig& sweep) {
  std::ostringstream os;
  os.precision(17);
  auto list_d = [&](const std::vector<double>& v) {
    std::ostringstream s;
    s.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
  };
  auto list_i = [&](const std::vector<int>& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
  };
  os << "carrier_frequency = " << sys.carrier_frequency << "\n"
     << "bandwidth = " << sys.bandwidth << "\n"
     << "pathloss_exponent = " << sys.pathloss_exponent << "\n"
     << "reference_distance = " << sys.reference_distance << "\n"
     << "max_distance = " << sys.max_distance << "\n"
     << "si_cancellation = " << sys.si_cancellation << "\n"
     << "noise_power_dl = " << sys.noise_power_dl << "\n"
     << "noise_power_ul = " << sys.noise_power_ul << "\n"
     << "antenna_gain = " << sys.antenna_gain << "\n"
     << "rician_factor = " << sys.rician_factor << "\n"
     << "num_antennas = " << sys.num_antennas << "\n"
     << "num_dl_users = " << sys.num_dl_users << "\n"
     << "num_ul_users = " << sys.num_ul_users << "\n"
     << "sinr_target_dl = " << list_d(sys.sinr_target_dl) << "\n"
     << "sinr_target_ul = " << list_d(sys.sinr_target_ul) << "\n"
     << "lambda_step = " << sweep.lambda_step << "\n"
     << "num_drops = " << sweep.num_drops << "\n"
     << "master_seed = " << sweep.master_seed << "\n"
     << "nt_list = " << list_i(sweep.nt_list) << "\n"
     << "sinr_dl_sweep = " << list_d(sweep.sinr_dl_sweep) << "\n";
  return os.str();
}

}  // namespace fdpa
