#pragma once
// Quantum-jump machinery: non-Hermitian Hamiltonians for the full
// three-level model and for the adiabatic two-level reduction, the
// collapse channels feeding the detectors, and waiting-time sampling.

#include <string>
#include <vector>

#include "cavtel/analytic.hpp"
#include "cavtel/core_math.hpp"
#include "cavtel/rng.hpp"

namespace cavtel::qdyn {

enum class Model { Full, Adiabatic };

struct HamiltonianSpec {
  analytic::SystemParams params;
  Model model = Model::Full;
  bool laser_a = true;  // Alice's classical pulse on
  bool laser_b = true;  // Bob's classical pulse on
  int n_max = 1;
};

// Effective Hamiltonian including the damping terms -i kappa n per cavity
// and, in the full model, -i gamma |2><2| per atom.  The adiabatic model
// requires omega == g (the reduction is only valid there) and ignores the
// excited level entirely.
Operator build_hamiltonian(const HamiltonianSpec& spec);

struct CollapseChannel {
  std::string label;
  int detector = 0;  // +1 -> D+, -1 -> D-, 0 -> undetectable
  Operator op;
};

// Cavity decay enters through the beam-splitter modes
// sqrt(kappa)(a_A + i a_B) and sqrt(kappa)(a_A - i a_B); the full model
// with gamma > 0 adds spontaneous emission |0><2| and |1><2| on each atom
// with branching fraction branch_to_0 into |0>.  The channels satisfy
// sum C^dag C = -2 Im H for the matching Hamiltonian.
std::vector<CollapseChannel> build_collapse_channels(
    const analytic::SystemParams& p, Model model, int n_max,
    double branch_to_0 = 0.5);

struct JumpResult {
  bool jumped = false;
  double t = 0.0;     // time of the jump within the window (us)
  int channel = -1;   // index into the channel list
};

// Waiting-time sampling over [0, t_window].  psi must enter normalized.
// If a jump occurs, psi becomes the normalized post-jump state and the
// caller continues the same window from t; otherwise psi is left as the
// unnormalized no-jump state at t_window (its norm^2 is the no-jump
// probability).  Jump times are bisected to time_tol.
JumpResult sample_jump(JointState& psi, const Propagator& prop,
                       Propagator::Workspace& ws,
                       const std::vector<CollapseChannel>& channels,
                       double t_window, RngStream& rng,
                       double time_tol = 1e-6);

}  // namespace cavtel::qdyn
