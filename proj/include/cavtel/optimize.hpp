#pragma once
// Monte Carlo fine-tuning of the pulse schedule around the closed-form
// seed.  The objective is evaluated with common random numbers (a fixed
// seed), so comparisons between candidate schedules are deterministic
// and low-variance; Nelder-Mead then walks (t_a, t_b) inside a box
// around the seed.

#include <cstdint>

#include "cavtel/estimate.hpp"

namespace cavtel::optimize {

enum class Objective { ConditionalFidelity, FidelityTimesSuccess };

struct TuneOptions {
  double bounds_frac = 0.30;  // box half-width, relative to the seed times
  int max_evals = 60;
  double simplex_tol = 2e-3;  // stop when the simplex shrinks below this
                              // fraction of the seed times
  int n_inputs = 12;          // Haar inputs per evaluation
  int n_traj = 600;           // trajectories per input per evaluation
  std::uint64_t seed = 1;
  int n_max = 1;
  qdyn::Model model = qdyn::Model::Full;
  double t_d_factor = 4.0;
  Objective objective = Objective::ConditionalFidelity;
};

struct TuneResult {
  analytic::PulseSchedule schedule;       // tuned times
  analytic::PulseSchedule seed_schedule;  // closed-form starting point
  double objective = 0.0;
  double seed_objective = 0.0;
  int n_evals = 0;
  bool improved = false;
};

TuneResult fine_tune(const analytic::SystemParams& p,
                     analytic::ProtocolMode mode,
                     const protocol::DetectorModel& det,
                     const TuneOptions& opt);

}  // namespace cavtel::optimize
