#pragma once
// Monte Carlo estimation over input ensembles.  Aggregation is blocked
// and order-fixed, so results are byte-identical for any worker count.
//
// The fidelity estimate is the mean over inputs of the per-input
// conditional success fidelity (the quantity the closed-form input
// average describes); the success estimate pools all runs.

#include <cstdint>
#include <vector>

#include "cavtel/protocol.hpp"

namespace cavtel::estimate {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

enum class EnsembleKind { Haar, Fixed };

struct InputEnsemble {
  EnsembleKind kind = EnsembleKind::Haar;
  int count = 1;  // distinct inputs drawn (Fixed repeats one input)
  analytic::InputQubit fixed{};

  // Deterministic input for index i; Haar draws |beta|^2 and the relative
  // phase uniformly from a dedicated stream.
  analytic::InputQubit input(int i, std::uint64_t seed) const;
};

struct EstimateOptions {
  std::uint64_t seed = 1;
  int n_traj = 1000;  // trajectories per input
  int n_threads = 1;  // 0 -> hardware concurrency
};

struct ProtocolEstimate {
  Estimate fidelity;  // over inputs, conditioned on indicated success
  Estimate success;   // pooled indicated-success rate
  std::uint64_t n_runs = 0;
  std::uint64_t n_success = 0;
  std::uint64_t n_contaminated = 0;
  std::uint64_t n_no_click = 0;
  std::uint64_t n_double_click = 0;
  std::uint64_t n_plus = 0;           // detector signs among successes
  std::uint64_t n_minus = 0;
  int n_fidelity_inputs = 0;  // inputs with at least one success
};

ProtocolEstimate estimate_protocol(const protocol::TrajectoryEngine& engine,
                                   const InputEnsemble& ensemble,
                                   const EstimateOptions& opt);

}  // namespace cavtel::estimate
