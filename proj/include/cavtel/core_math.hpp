#pragma once
// State vectors, operators and matrix exponentials on the joint Hilbert
// space of two atom-cavity systems.
//
// Each side holds a three-level atom (|0>, |1>, |2>) and a cavity mode
// truncated at n_max photons.  A joint basis state |j_A n_A j_B n_B| maps
// to the flat index
//   ((j_A*(n_max+1) + n_A)*3 + j_B)*(n_max+1) + n_B .
// All rates are angular (rad/us); times are in us.

#include <complex>
#include <memory>
#include <vector>

#include "cavtel/kernels.hpp"

namespace cavtel {

using Cplx = std::complex<double>;

enum class Side { A, B };

struct JointState {
  int n_max = 1;
  std::vector<Cplx> amp;

  explicit JointState(int n_max_photons = 1);

  int dim() const { return int(amp.size()); }
  int index(int j_a, int n_a, int j_b, int n_b) const;
  Cplx& at(int j_a, int n_a, int j_b, int n_b);
  const Cplx& at(int j_a, int n_a, int j_b, int n_b) const;

  double norm2() const;
  // Rescales to unit norm; throws std::runtime_error on underflow.
  void normalize();
};

struct Operator {
  int n_max = 1;
  int dim = 0;
  std::vector<Cplx> m;  // row-major dim x dim

  static Operator zero(int n_max_photons);
  static Operator identity(int n_max_photons);

  Cplx& at(int row, int col) { return m[std::size_t(row) * dim + col]; }
  const Cplx& at(int row, int col) const {
    return m[std::size_t(row) * dim + col];
  }

  Operator& add_scaled(Cplx s, const Operator& o);  // *this += s * o
  Operator dagger() const;
  Operator operator*(const Operator& o) const;  // matrix product

  void apply(const JointState& in, JointState& out) const;  // out = M in
  JointState apply(const JointState& in) const;
  double max_abs() const;
};

// |i><j| on one side's atom, identity elsewhere.
Operator build_flip(int n_max, Side side, int i, int j);
// Cavity annihilation operator on one side, identity elsewhere.
Operator build_annihilation(int n_max, Side side);
// Cavity photon-number operator on one side.
Operator build_number(int n_max, Side side);

// Applies psi -> exp(-i H t) psi for a fixed (generally non-Hermitian) H.
//
// The default route diagonalizes H once and applies V e^{-i lambda t} V^-1
// with the dispatched kernels.  When H is diagonal the matvecs are skipped
// entirely, and when the eigenbasis is ill-conditioned (or the residual
// check fails) a scaled Taylor series is used instead.
class Propagator {
 public:
  explicit Propagator(const Operator& h);
  ~Propagator();
  Propagator(Propagator&&) noexcept;
  Propagator& operator=(Propagator&&) noexcept;

  int dim() const;
  bool diagonal() const;
  bool eigen_route() const;

  void apply(double t, const JointState& in, JointState& out) const;
  JointState apply(double t, const JointState& in) const;

  // Split evaluation for repeated queries with the same input state:
  // enter() factors the state once; norm2_at()/state_at() then evaluate
  // exp(-i H t) psi cheaply for many t inside the same window.
  struct Workspace {
    std::vector<Cplx> w, z;
    std::vector<double> w2;  // |w_i|^2, diagonal fast path
    JointState scratch{1};
  };
  void enter(const JointState& in, Workspace& ws) const;
  double norm2_at(double t, Workspace& ws) const;
  void state_at(double t, Workspace& ws, JointState& out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around Propagator.
JointState expm_apply(const Operator& h, double t, const JointState& psi);

}  // namespace cavtel
