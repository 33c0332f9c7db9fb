#include "cavtel/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace cavtel {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': " + v);
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return int(x);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for '" + key + "': " + v);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for '" + key + "': " + v);
  }
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "delta_mhz") c.delta_mhz = parse_double(key, value);
  else if (key == "omega_mhz") c.omega_mhz = parse_double(key, value);
  else if (key == "g_mhz") c.g_mhz = parse_double(key, value);
  else if (key == "kappa_mhz") c.kappa_mhz = parse_double(key, value);
  else if (key == "gamma_mhz") c.gamma_mhz = parse_double(key, value);
  else if (key == "eta") c.eta = parse_double(key, value);
  else if (key == "dark_rate_hz") c.dark_rate_hz = parse_double(key, value);
  else if (key == "detector") c.detector = value;
  else if (key == "mode") c.mode = value;
  else if (key == "backend") c.backend = value;
  else if (key == "model") c.model = value;
  else if (key == "ensemble") c.ensemble = value;
  else if (key == "fixed_beta2") c.fixed_beta2 = parse_double(key, value);
  else if (key == "fixed_beta_phase")
    c.fixed_beta_phase = parse_double(key, value);
  else if (key == "n_traj") c.n_traj = parse_int(key, value);
  else if (key == "n_states") c.n_states = parse_int(key, value);
  else if (key == "seed") c.seed = parse_u64(key, value);
  else if (key == "n_threads") c.n_threads = parse_int(key, value);
  else if (key == "n_max") c.n_max = parse_int(key, value);
  else if (key == "t_d_factor") c.t_d_factor = parse_double(key, value);
  else if (key == "branch_n") c.branch_n = parse_int(key, value);
  else if (key == "t_a_us") c.t_a_us = parse_double(key, value);
  else if (key == "t_b_us") c.t_b_us = parse_double(key, value);
  else throw ConfigError("unknown configuration key: " + key);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key=value, got '" + line + "'");
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must be key=value, got '" + assignment + "'");
  set_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

analytic::SystemParams system_params(const RunConfig& cfg) {
  try {
    return analytic::SystemParams::from_mhz(cfg.delta_mhz, cfg.omega_mhz,
                                            cfg.g_mhz, cfg.kappa_mhz,
                                            cfg.gamma_mhz);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad system parameters: ") + e.what());
  }
}

analytic::ProtocolMode protocol_mode(const RunConfig& cfg) {
  if (cfg.mode == "modified") return analytic::ProtocolMode::Modified;
  if (cfg.mode == "original") return analytic::ProtocolMode::Original;
  throw ConfigError("mode must be 'modified' or 'original', got '" +
                    cfg.mode + "'");
}

analytic::DetectorKind detector_kind(const RunConfig& cfg) {
  if (cfg.detector == "conventional")
    return analytic::DetectorKind::Conventional;
  if (cfg.detector == "resolving") return analytic::DetectorKind::Resolving;
  throw ConfigError("detector must be 'conventional' or 'resolving', got '" +
                    cfg.detector + "'");
}

protocol::DetectorModel detector_model(const RunConfig& cfg) {
  protocol::DetectorModel det;
  det.kind = detector_kind(cfg);
  det.eta = cfg.eta;
  det.dark_rate_hz = cfg.dark_rate_hz;
  try {
    det.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad detector settings: ") + e.what());
  }
  return det;
}

qdyn::Model dynamics_model(const RunConfig& cfg) {
  if (cfg.model == "adiabatic") return qdyn::Model::Adiabatic;
  if (cfg.model == "full") return qdyn::Model::Full;
  throw ConfigError("model must be 'adiabatic' or 'full', got '" + cfg.model +
                    "'");
}

estimate::InputEnsemble input_ensemble(const RunConfig& cfg) {
  estimate::InputEnsemble ens;
  if (cfg.n_states < 1) throw ConfigError("n_states must be positive");
  ens.count = cfg.n_states;
  if (cfg.ensemble == "haar") {
    ens.kind = estimate::EnsembleKind::Haar;
  } else if (cfg.ensemble == "fixed") {
    ens.kind = estimate::EnsembleKind::Fixed;
    try {
      ens.fixed = analytic::InputQubit::from_beta2(cfg.fixed_beta2,
                                                   cfg.fixed_beta_phase);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("bad fixed input: ") + e.what());
    }
  } else {
    throw ConfigError("ensemble must be 'haar' or 'fixed', got '" +
                      cfg.ensemble + "'");
  }
  return ens;
}

analytic::PulseSchedule schedule(const RunConfig& cfg) {
  const auto p = system_params(cfg);
  try {
    auto s = analytic::make_schedule(p, protocol_mode(cfg), cfg.t_d_factor,
                                     cfg.branch_n);
    if (cfg.t_a_us > 0.0) s.t_a = cfg.t_a_us;
    if (cfg.t_b_us > 0.0) s.t_b = cfg.t_b_us;
    return s;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot build schedule: ") + e.what());
  }
}

}  // namespace cavtel
