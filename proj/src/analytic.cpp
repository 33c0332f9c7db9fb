#include "cavtel/analytic.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace cavtel::analytic {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Adaptive Simpson quadrature.
double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm, double whole,
               double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol_abs) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, fa, b, fb, m, fm, whole, tol_abs, 48);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(what);
}

}  // namespace

SystemParams SystemParams::from_mhz(double delta_mhz, double omega_mhz,
                                    double g_mhz, double kappa_mhz,
                                    double gamma_mhz) {
  SystemParams p;
  p.delta = kTwoPi * delta_mhz;
  p.omega = kTwoPi * omega_mhz;
  p.g = kTwoPi * g_mhz;
  p.kappa = kTwoPi * kappa_mhz;
  p.gamma = kTwoPi * gamma_mhz;
  p.validate();
  return p;
}

void SystemParams::validate() const {
  require_finite(delta, "delta must be finite");
  require_finite(omega, "omega must be finite");
  require_finite(g, "g must be finite");
  require_finite(kappa, "kappa must be finite");
  require_finite(gamma, "gamma must be finite");
  if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
  if (omega <= 0.0) throw std::invalid_argument("omega must be positive");
  if (g <= 0.0) throw std::invalid_argument("g must be positive");
  if (kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
  if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
}

bool SystemParams::underdamped() const {
  const double d = delta_eff();
  return 4.0 * d * d > kappa * kappa;
}

double SystemParams::omega_kappa() const {
  const double d = delta_eff();
  const double arg = 4.0 * d * d - kappa * kappa;
  if (arg <= 0.0)
    throw std::domain_error(
        "overdamped regime: kappa >= 2 g^2/Delta, no Rabi oscillation");
  return std::sqrt(arg);
}

InputQubit InputQubit::from_beta2(double beta2, double phase) {
  if (beta2 < 0.0 || beta2 > 1.0)
    throw std::invalid_argument("beta2 must lie in [0, 1]");
  InputQubit q;
  q.alpha = Cplx(std::sqrt(1.0 - beta2), 0.0);
  q.beta = std::sqrt(beta2) * Cplx(std::cos(phase), std::sin(phase));
  return q;
}

void InputQubit::validate() const {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()) ||
      !std::isfinite(beta.real()) || !std::isfinite(beta.imag()))
    throw std::invalid_argument("input amplitudes must be finite");
  if (std::abs(alpha2() + beta2() - 1.0) > 1e-9)
    throw std::invalid_argument("input qubit must be normalized");
}

double amp_a(const SystemParams& p, double t) {
  const double ok = p.omega_kappa();
  return (2.0 * p.delta_eff() / ok) * std::sin(0.5 * ok * t);
}

double amp_b(const SystemParams& p, double t) {
  const double ok = p.omega_kappa();
  return std::cos(0.5 * ok * t) + (p.kappa / ok) * std::sin(0.5 * ok * t);
}

double mapping_time(const SystemParams& p) {
  const double ok = p.omega_kappa();
  // First root of b(t) = 0; atan2 covers the kappa -> 0 limit (pi/2).
  return (2.0 / ok) * (M_PI - std::atan2(ok, p.kappa));
}

double bob_time(const SystemParams& p, ProtocolMode mode, int branch_n) {
  if (branch_n < 0) throw std::invalid_argument("branch_n must be >= 0");
  const double ok = p.omega_kappa();
  const double d2 = 2.0 * p.delta_eff();
  double phase;
  if (mode == ProtocolMode::Modified) {
    const double e = std::exp(-0.5 * p.kappa * mapping_time(p));
    phase = std::atan2(ok * e, d2 - e * p.kappa);
  } else {
    phase = std::atan2(ok, d2 - p.kappa);
  }
  return (2.0 / ok) * (phase + branch_n * M_PI);
}

PulseSchedule make_schedule(const SystemParams& p, ProtocolMode mode,
                            double t_d_factor, int branch_n) {
  if (p.kappa <= 0.0)
    throw std::invalid_argument("schedule requires kappa > 0");
  if (t_d_factor <= 0.0)
    throw std::invalid_argument("t_d_factor must be positive");
  PulseSchedule s;
  s.t_a = mapping_time(p);
  s.t_b = bob_time(p, mode, branch_n);
  s.t_d = t_d_factor / p.kappa;
  return s;
}

double compensation_residual(const SystemParams& p, const PulseSchedule& s) {
  return std::exp(-0.5 * p.kappa * s.t_a) * amp_b(p, s.t_b) - amp_a(p, s.t_b);
}

double prep_success_alice(const SystemParams& p, const PulseSchedule& s,
                          const InputQubit& q) {
  return q.alpha2() + std::exp(-p.kappa * s.t_a) * q.beta2();
}

double prep_success_bob(const SystemParams& p, const PulseSchedule& s) {
  const double a = amp_a(p, s.t_b), b = amp_b(p, s.t_b);
  return std::exp(-p.kappa * s.t_b) * (a * a + b * b);
}

SurvivalProbs survival_probs(const SystemParams& p, const PulseSchedule& s,
                             const InputQubit& q, double t_j) {
  if (t_j < 0.0) throw std::invalid_argument("t_j must be >= 0");
  SurvivalProbs out;
  const double a2 = q.alpha2(), b2 = q.beta2();
  const double ea = std::exp(-p.kappa * s.t_a);
  out.alice = (a2 + ea * std::exp(-2.0 * p.kappa * t_j) * b2) / (a2 + ea * b2);
  const double a = amp_a(p, s.t_b), b = amp_b(p, s.t_b);
  out.bob = (a * a * std::exp(-2.0 * p.kappa * t_j) + b * b) / (a * a + b * b);
  return out;
}

double success_probability(const SystemParams& p, const PulseSchedule& s) {
  const double a = amp_a(p, s.t_b);
  return std::exp(-p.kappa * s.t_b) * a * a;
}

double coherent_channel_weight(const SystemParams& p, const PulseSchedule& s,
                               const InputQubit& q) {
  const double a = amp_a(p, s.t_b), b = amp_b(p, s.t_b);
  const double eb = std::exp(-p.kappa * s.t_b);
  const double ea = std::exp(-p.kappa * s.t_a);
  return q.alpha2() * eb * a * a + q.beta2() * ea * eb * b * b;
}

double success_probability_quadrature(const SystemParams& p,
                                      const PulseSchedule& s,
                                      const InputQubit& q) {
  // One click at t_j (both detectors), weighted by the no-second-emission
  // factor up to the end of the window.  In unnormalized bookkeeping the
  // integrand reduces to
  //   2 kappa [ p_a(t) q_b + |alpha|^2 p_b(t)
  //             + 2 p_a(t) p_b(t) e^{-2 kappa (t_d - t)} ]
  // with p_a(t) = |beta|^2 e^{-kappa t_a} e^{-2 kappa t} the surviving
  // Alice-photon weight, p_b(t) the Bob-photon weight and q_b the weight
  // of Bob's no-photon branch.
  const double a = amp_a(p, s.t_b), b = amp_b(p, s.t_b);
  const double eb = std::exp(-p.kappa * s.t_b);
  const double pa0 = q.beta2() * std::exp(-p.kappa * s.t_a);
  const double pb0 = eb * a * a;
  const double qb = eb * b * b;
  const double al2 = q.alpha2();
  const double k = p.kappa;
  const auto integrand = [&](double t) {
    const double decay = std::exp(-2.0 * k * t);
    const double pa = pa0 * decay, pb = pb0 * decay;
    const double tail = std::exp(-2.0 * k * (s.t_d - t));
    return 2.0 * k * (pa * qb + al2 * pb + 2.0 * pa * pb * tail);
  };
  const double scale = 2.0 * k * (pa0 * qb + al2 * pb0 + 2.0 * pa0 * pb0);
  return integrate(integrand, 0.0, s.t_d, 1e-10 * std::max(scale, 1e-30));
}

double xi_factor(const SystemParams& p, const PulseSchedule& s,
                 DetectorKind kind) {
  return kind == DetectorKind::Resolving
             ? 1.0
             : 1.0 - success_probability(p, s);
}

double two_photon_prob(const SystemParams& p, const PulseSchedule& s,
                       double beta2, double eta, DetectorKind kind) {
  if (beta2 < 0.0 || beta2 > 1.0)
    throw std::invalid_argument("beta2 must lie in [0, 1]");
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("eta must lie in [0, 1]");
  const double xi = xi_factor(p, s, kind);
  return beta2 * std::exp(-p.kappa * s.t_a) * eta * (1.0 - eta * xi);
}

double average_success(const SystemParams& p, const PulseSchedule& s,
                       double eta, DetectorKind kind) {
  return eta * success_probability(p, s) +
         two_photon_prob(p, s, 0.5, eta, kind);
}

double average_fidelity(const SystemParams& p, const PulseSchedule& s,
                        double eta, DetectorKind kind) {
  const double ps = success_probability(p, s);
  const double b = std::exp(-p.kappa * s.t_a) *
                   (1.0 - eta * xi_factor(p, s, kind));
  if (b <= 0.0) return 1.0;  // no two-photon branch survives
  const double z = ps / b;
  if (z >= 50.0) {
    // Series expansion of 1/2 + z - z^2 ln(1 + 1/z); the direct form
    // cancels catastrophically for large z.
    const double iz = 1.0 / z;
    return 1.0 + iz * (-1.0 / 3.0 +
                       iz * (1.0 / 4.0 + iz * (-1.0 / 5.0 + iz / 6.0)));
  }
  return 0.5 + z - z * z * std::log1p(1.0 / z);
}

BobState final_bob_state(const SystemParams& p, const PulseSchedule& s,
                         const InputQubit& q, int epsilon) {
  if (epsilon != 1 && epsilon != -1)
    throw std::invalid_argument("epsilon must be +1 or -1");
  const double d = p.delta_eff();
  BobState out;
  out.c1 = std::exp(Cplx(0.0, d * s.t_a)) *
           std::exp(-0.5 * p.kappa * s.t_a) * q.beta * amp_b(p, s.t_b);
  out.c0 = double(epsilon) * Cplx(0.0, 1.0) * q.alpha * amp_a(p, s.t_b);
  return out;
}

double corrected_fidelity(const SystemParams& p, const PulseSchedule& s,
                          const BobState& bob, const InputQubit& q,
                          int epsilon) {
  // Undo the -i epsilon e^{i delta t_a} factor on the |1> amplitude.
  const double d = p.delta_eff();
  const Cplx undo =
      double(epsilon) * Cplx(0.0, 1.0) * std::exp(Cplx(0.0, -d * s.t_a));
  const Cplx c1 = undo * bob.c1;
  const double n2 = std::norm(bob.c0) + std::norm(c1);
  if (n2 <= 0.0) throw std::domain_error("empty conditional state");
  const Cplx overlap = std::conj(q.alpha) * bob.c0 + std::conj(q.beta) * c1;
  return std::norm(overlap) / n2;
}

double success_fidelity(const SystemParams& p, const PulseSchedule& s,
                        const InputQubit& q) {
  const BobState bob = final_bob_state(p, s, q, +1);
  return corrected_fidelity(p, s, bob, q, +1);
}

double haar_success_fidelity(const SystemParams& p, const PulseSchedule& s) {
  // Haar measure on a qubit makes |beta|^2 uniform on [0, 1]; the
  // corrected fidelity does not depend on the relative phase.
  const auto f = [&](double x) {
    if (x <= 0.0 || x >= 1.0) return 1.0;  // pole states map exactly
    return success_fidelity(p, s, InputQubit::from_beta2(x));
  };
  return integrate(f, 0.0, 1.0, 1e-10);
}

}  // namespace cavtel::analytic
