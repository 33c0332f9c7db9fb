#pragma once
// Closed-form laws of the cavity-decay teleportation protocol: pulse
// timing, damped Rabi amplitudes, preparation/success probabilities and
// post-selected fidelities.
//
// Rates are angular (rad/us), built from frequency/2pi values in MHz via
// SystemParams::from_mhz.  Times are in us.

#include <complex>

namespace cavtel::analytic {

using Cplx = std::complex<double>;

struct SystemParams {
  double delta = 0.0;  // laser/cavity detuning from the excited level
  double omega = 0.0;  // laser Rabi coupling
  double g = 0.0;      // atom-cavity coupling
  double kappa = 0.0;  // cavity field decay rate
  double gamma = 0.0;  // atomic polarization decay rate (full model only)

  static SystemParams from_mhz(double delta_mhz, double omega_mhz,
                               double g_mhz, double kappa_mhz,
                               double gamma_mhz = 0.0);

  double delta_eff() const { return g * g / delta; }  // two-photon coupling
  bool underdamped() const;
  // sqrt(4 delta_eff^2 - kappa^2); throws std::domain_error when overdamped.
  double omega_kappa() const;
  void validate() const;
};

struct InputQubit {
  Cplx alpha{1.0, 0.0};
  Cplx beta{0.0, 0.0};

  static InputQubit from_beta2(double beta2, double phase = 0.0);
  double alpha2() const { return std::norm(alpha); }
  double beta2() const { return std::norm(beta); }
  void validate() const;  // |alpha|^2 + |beta|^2 == 1
};

// Modified: Bob's pulse stops at the damping-compensation point
// a(t_B) = e^{-kappa t_A/2} b(t_B).  Original: at the maximally entangled
// point a(t_B) = b(t_B).
enum class ProtocolMode { Modified, Original };

enum class DetectorKind { Resolving, Conventional };

struct PulseSchedule {
  double t_a = 0.0;  // Alice mapping pulse (us)
  double t_b = 0.0;  // Bob resource pulse (us)
  double t_d = 0.0;  // detection window (us)
};

// Damped vacuum Rabi amplitudes of the single-excitation manifold:
//   a(t) = (2 delta_eff/Omega_k) sin(Omega_k t/2)
//   b(t) = cos(Omega_k t/2) + (kappa/Omega_k) sin(Omega_k t/2)
double amp_a(const SystemParams& p, double t);
double amp_b(const SystemParams& p, double t);

// First zero of b(t): the atom->cavity mapping is complete.
double mapping_time(const SystemParams& p);
// Bob pulse length for the requested mode; branch_n selects later roots.
double bob_time(const SystemParams& p, ProtocolMode mode, int branch_n = 0);
// t_a/t_b as above plus detection window t_d = t_d_factor / kappa.
PulseSchedule make_schedule(const SystemParams& p, ProtocolMode mode,
                            double t_d_factor = 4.0, int branch_n = 0);

// e^{-kappa t_a/2} b(t_b) - a(t_b); zero when damping is compensated.
double compensation_residual(const SystemParams& p, const PulseSchedule& s);

// No-emission probabilities of the preparation stage.
double prep_success_alice(const SystemParams& p, const PulseSchedule& s,
                          const InputQubit& q);
double prep_success_bob(const SystemParams& p, const PulseSchedule& s);

// Conditional no-emission probabilities a time t_j into the detection
// stage, given a successful preparation.
struct SurvivalProbs {
  double alice = 1.0;
  double bob = 1.0;
};
SurvivalProbs survival_probs(const SystemParams& p, const PulseSchedule& s,
                             const InputQubit& q, double t_j);

// Probability that exactly one photon is emitted and it is detected
// (unit-efficiency detectors), in the t_d -> infinity limit; the
// closed form is e^{-kappa t_b} a(t_b)^2 under compensation.
double success_probability(const SystemParams& p, const PulseSchedule& s);
// Same quantity as an adaptive quadrature over the click time, at the
// finite detection window of the schedule.  Input-dependent only away
// from the compensation point or at finite t_d.
double success_probability_quadrature(const SystemParams& p,
                                      const PulseSchedule& s,
                                      const InputQubit& q);
// Coherent one-photon channel weight for an arbitrary input/mode:
// |alpha|^2 e^{-kappa t_b} a^2 + |beta|^2 e^{-kappa t_a} e^{-kappa t_b} b^2.
double coherent_channel_weight(const SystemParams& p, const PulseSchedule& s,
                               const InputQubit& q);

// Detector-resolution factor: 1 for photon-number-resolving detectors,
// 1 - P_suc for conventional ones.
double xi_factor(const SystemParams& p, const PulseSchedule& s,
                 DetectorKind kind);
// Probability that two photons are emitted during the protocol and the
// detection record still shows exactly one click:
//   beta2 * e^{-kappa t_a} * eta * (1 - eta xi).
double two_photon_prob(const SystemParams& p, const PulseSchedule& s,
                       double beta2, double eta, DetectorKind kind);

// Input-averaged indicated-success probability,
//   eta P_suc + e^{-kappa t_a} eta (1 - eta xi) / 2.
double average_success(const SystemParams& p, const PulseSchedule& s,
                       double eta, DetectorKind kind);
// Input-averaged post-selected fidelity,
//   1/2 + P/B - (P/B)^2 ln(1 + B/P),  B = e^{-kappa t_a}(1 - eta xi).
double average_fidelity(const SystemParams& p, const PulseSchedule& s,
                        double eta, DetectorKind kind);

// Bob's conditional state after a single click (epsilon = detector sign),
// before corrections; unnormalized amplitudes on atom |0>, |1>.
struct BobState {
  Cplx c0{0.0, 0.0};
  Cplx c1{0.0, 0.0};
  double norm2() const { return std::norm(c0) + std::norm(c1); }
};
BobState final_bob_state(const SystemParams& p, const PulseSchedule& s,
                         const InputQubit& q, int epsilon);
// Fidelity against the input after the epsilon sign and e^{i delta t_a}
// phase corrections.
double corrected_fidelity(const SystemParams& p, const PulseSchedule& s,
                          const BobState& bob, const InputQubit& q,
                          int epsilon);
// Fidelity of the one-click branch for a given input (1 under
// compensation; damped-distorted in the original mode).
double success_fidelity(const SystemParams& p, const PulseSchedule& s,
                        const InputQubit& q);
// Haar average of success_fidelity over the input qubit (quadrature).
double haar_success_fidelity(const SystemParams& p, const PulseSchedule& s);

}  // namespace cavtel::analytic
