#pragma once
// Flat key=value run configuration ('#' comments, unknown keys rejected)
// and its translation to the typed protocol objects.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "cavtel/estimate.hpp"

namespace cavtel {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // frequency/2pi values (MHz)
  double delta_mhz = 62.5;
  double omega_mhz = 16.0;
  double g_mhz = 16.0;
  double kappa_mhz = 4.0;
  double gamma_mhz = 0.0;

  double eta = 1.0;
  double dark_rate_hz = 0.0;
  std::string detector = "conventional";  // conventional | resolving
  std::string mode = "modified";          // modified | original
  std::string backend = "analytic";       // analytic | trajectory
  std::string model = "adiabatic";        // adiabatic | full
  std::string ensemble = "haar";          // haar | fixed
  double fixed_beta2 = 0.5;
  double fixed_beta_phase = 0.0;

  int n_traj = 1000;
  int n_states = 100;
  std::uint64_t seed = 12345;
  int n_threads = 1;
  int n_max = 1;

  double t_d_factor = 4.0;
  int branch_n = 0;
  double t_a_us = 0.0;  // 0 -> closed-form schedule
  double t_b_us = 0.0;
};

// Parsers throw ConfigError with the offending key/line in the message.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& assignment);

// Typed views (validate and throw ConfigError on bad values).
analytic::SystemParams system_params(const RunConfig& cfg);
analytic::ProtocolMode protocol_mode(const RunConfig& cfg);
analytic::DetectorKind detector_kind(const RunConfig& cfg);
protocol::DetectorModel detector_model(const RunConfig& cfg);
qdyn::Model dynamics_model(const RunConfig& cfg);
estimate::InputEnsemble input_ensemble(const RunConfig& cfg);
// Closed-form schedule unless t_a_us/t_b_us override it.
analytic::PulseSchedule schedule(const RunConfig& cfg);

}  // namespace cavtel
