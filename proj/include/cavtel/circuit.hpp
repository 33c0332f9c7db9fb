#pragma once
// Abstract three-qubit account of the teleportation step: a distorted
// input qubit (|1> amplitude damped by zeta) teleported through a
// non-maximally entangled resource a|10> + b|01>, with the four
// Bell-type measurement branches and Bob's Pauli corrections.
//
// The compensation theorem lives here: for a = zeta b the one-click
// branches (outcomes 01 and 10) return the undistorted input exactly.

#include <array>
#include <complex>

namespace cavtel::circuit {

using Cplx = std::complex<double>;

struct DistortedInput {
  Cplx alpha{1.0, 0.0};
  Cplx beta{0.0, 0.0};
  Cplx zeta{1.0, 0.0};  // damping distortion on the |1> amplitude

  void validate() const;
  // 1/sqrt(|alpha|^2 + |zeta beta|^2)
  double normalization() const;
};

struct ResourceState {
  Cplx a{0.0, 0.0};  // photon branch
  Cplx b{1.0, 0.0};  // excited-atom branch

  void validate() const;  // |a|^2 + |b|^2 == 1
};

struct Branch {
  int m1 = 0, m2 = 0;     // measurement outcome bits
  Cplx c0{0.0, 0.0};      // unnormalized Bob amplitudes (|0>, |1>)
  Cplx c1{0.0, 0.0};
  double probability() const { return std::norm(c0) + std::norm(c1); }
};

// The four unnormalized post-measurement branches, including the global
// N/sqrt(2) prefactor, ordered (00, 01, 10, 11).
std::array<Branch, 4> branch_states(const DistortedInput& in,
                                    const ResourceState& res);

// Bob's correction for each outcome: 00 -> X, 01 -> I, 10 -> Z,
// 11 -> X then Z.
Branch apply_correction(const Branch& br);

struct BranchReport {
  double probability = 0.0;  // probability of the outcome
  double fidelity = 0.0;     // corrected fidelity vs the undistorted input
};
BranchReport postselect_fidelity(const DistortedInput& in,
                                 const ResourceState& res, int m1, int m2);

}  // namespace cavtel::circuit
