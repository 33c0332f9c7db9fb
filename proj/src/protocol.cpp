#include "cavtel/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cavtel::protocol {

void DetectorModel::validate() const {
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("eta must lie in [0, 1]");
  if (!(dark_rate_hz >= 0.0) || !std::isfinite(dark_rate_hz))
    throw std::invalid_argument("dark rate must be finite and >= 0");
}

Classification classify(const std::vector<Click>& clicks, double t_a,
                        DetectorKind kind, int n_emissions,
                        int* epsilon_out) {
  if (epsilon_out) *epsilon_out = 0;
  int n_prep = 0;
  bool win_plus = false, win_minus = false;
  int n_win = 0;
  int first_win_detector = 0;
  for (const auto& c : clicks) {
    if (c.t < t_a) {
      ++n_prep;
    } else {
      ++n_win;
      if (n_win == 1) first_win_detector = c.detector;
      (c.detector > 0 ? win_plus : win_minus) = true;
    }
  }
  if (n_prep > 0)
    return (n_prep + n_win >= 2) ? Classification::DoubleClick
                                 : Classification::NoClick;
  if (n_win == 0) return Classification::NoClick;

  int epsilon;
  if (kind == DetectorKind::Conventional) {
    if (win_plus && win_minus) return Classification::DoubleClick;
    epsilon = win_plus ? +1 : -1;
  } else {
    if (n_win >= 2) return Classification::DoubleClick;
    epsilon = first_win_detector;
  }
  if (epsilon_out) *epsilon_out = epsilon;
  return n_emissions >= 2 ? Classification::ContaminatedSuccess
                          : Classification::Success;
}

double BranchProbs::average_fidelity() const {
  const double ind = indicated();
  if (ind <= 0.0) return 0.0;
  return ((success_plus + success_minus) * fidelity_success +
          contaminated * fidelity_contaminated) /
         ind;
}

BranchProbs run_analytic(const SystemParams& p, const PulseSchedule& s,
                         const InputQubit& q, const DetectorModel& det) {
  q.validate();
  det.validate();
  if (std::abs(analytic::amp_b(p, s.t_a)) > 1e-6)
    throw std::invalid_argument(
        "closed-form distribution requires the mapping condition b(t_a) = 0");

  const double eta = det.eta;
  const double p1 = q.beta2();
  const double e_a = std::exp(-p.kappa * s.t_a);
  const double a = analytic::amp_a(p, s.t_b), b = analytic::amp_b(p, s.t_b);
  const double eb = std::exp(-p.kappa * s.t_b);
  const double ps_b = eb * a * a;       // Bob emits inside the window
  const double q_b = eb * b * b;        // Bob keeps the excitation
  const double u_b = 1.0 - ps_b - q_b;  // Bob emits during his pulse

  BranchProbs out;
  // Coherent one-photon channel: Bob's photon against Alice's surviving
  // photon (with Bob's atom still excited); both detector signs are
  // equally likely.
  const double w_coh = analytic::coherent_channel_weight(p, s, q);
  out.success_plus = 0.5 * eta * w_coh;
  out.success_minus = out.success_plus;

  // Two-emission patterns sorted by record: one undetected partner keeps
  // the single-click indication, while a second click (or a resolved
  // photon pair) is rejected.  Both window photons always leave through
  // the same port.
  const double prep_a = p1 * (1.0 - e_a);
  const double both_window = p1 * e_a * ps_b;
  double cont = eta * (1.0 - eta) * (prep_a * ps_b + p1 * e_a * u_b) +
                2.0 * eta * (1.0 - eta) * both_window;
  double dbl = eta * eta * (prep_a * (u_b + ps_b) + p1 * e_a * u_b);
  if (det.kind == DetectorKind::Conventional)
    cont += eta * eta * both_window;
  else
    dbl += eta * eta * both_window;
  out.contaminated = cont;
  out.double_click = dbl;
  out.no_click =
      1.0 - out.success_plus - out.success_minus - cont - dbl;

  out.fidelity_success = analytic::success_fidelity(p, s, q);
  out.fidelity_contaminated = q.alpha2();
  return out;
}

TrajectoryEngine::TrajectoryEngine(const SystemParams& p,
                                   const PulseSchedule& s,
                                   const DetectorModel& det,
                                   qdyn::Model model, int n_max)
    : params_(p), schedule_(s), detector_(det), model_(model), n_max_(n_max) {
  p.validate();
  det.validate();
  if (!(s.t_a > 0.0) || !(s.t_b > 0.0) || !(s.t_d >= 0.0))
    throw std::invalid_argument("pulse times must be positive");
  if (s.t_b > s.t_a)
    throw std::invalid_argument("Bob's pulse cannot outlast Alice's");
  channels_ = qdyn::build_collapse_channels(p, model, n_max);

  qdyn::HamiltonianSpec spec;
  spec.params = p;
  spec.model = model;
  spec.n_max = n_max;
  // Alice alone, then both pulses, then free decay.
  spec.laser_a = true;
  spec.laser_b = false;
  stages_.push_back({s.t_a - s.t_b, Propagator(qdyn::build_hamiltonian(spec))});
  spec.laser_b = true;
  stages_.push_back({s.t_b, Propagator(qdyn::build_hamiltonian(spec))});
  spec.laser_a = spec.laser_b = false;
  stages_.push_back({s.t_d, Propagator(qdyn::build_hamiltonian(spec))});
}

RunOutcome TrajectoryEngine::run(const InputQubit& q, RngStream& rng) const {
  q.validate();
  RunOutcome out;
  JointState psi(n_max_);
  psi.at(0, 0, 1, 0) = q.alpha;  // Bob's atom starts excited
  psi.at(1, 0, 1, 0) = q.beta;

  Propagator::Workspace ws;
  double t_abs = 0.0;
  for (const auto& stage : stages_) {
    if (stage.duration <= 0.0) continue;
    const double stage_end = t_abs + stage.duration;
    psi.normalize();
    while (true) {
      const auto jr = qdyn::sample_jump(psi, stage.prop, ws, channels_,
                                        stage_end - t_abs, rng);
      if (!jr.jumped) {
        t_abs = stage_end;
        break;
      }
      t_abs += jr.t;
      const auto& ch = channels_[jr.channel];
      if (ch.detector != 0) {
        ++out.n_emissions;
        if (rng.uniform() < detector_.eta)
          out.clicks.push_back({t_abs, ch.detector, false});
      } else {
        ++out.n_spont;
      }
      if (stage_end - t_abs <= 0.0) break;
    }
  }

  const double total_time = schedule_.t_a + schedule_.t_d;
  if (detector_.dark_rate_hz > 0.0) {
    const double mean = detector_.dark_rate_hz * 1e-6 * total_time;
    for (int detector : {+1, -1}) {
      const int n = rng.poisson(mean);
      for (int i = 0; i < n; ++i)
        out.clicks.push_back({rng.uniform() * total_time, detector, true});
    }
    std::stable_sort(out.clicks.begin(), out.clicks.end(),
                     [](const Click& l, const Click& r) {
                       if (l.t != r.t) return l.t < r.t;
                       return l.detector > r.detector;
                     });
  }

  out.cls = classify(out.clicks, schedule_.t_a, detector_.kind,
                     out.n_emissions, &out.epsilon);

  // Bob's reduced atomic density matrix from the final (normalized) state.
  psi.normalize();
  Cplx rho[3][3] = {};
  for (int ja = 0; ja < 3; ++ja)
    for (int na = 0; na <= n_max_; ++na)
      for (int nb = 0; nb <= n_max_; ++nb)
        for (int jb = 0; jb < 3; ++jb)
          for (int jc = 0; jc < 3; ++jc)
            rho[jb][jc] += psi.at(ja, na, jb, nb) *
                           std::conj(psi.at(ja, na, jc, nb));
  out.bob_ground = (rho[1][1].real() + rho[2][2].real() < 1e-6);

  if (out.cls == Classification::Success ||
      out.cls == Classification::ContaminatedSuccess) {
    // Undo the -i epsilon e^{i delta t_a} factor riding on |1>.
    const double d = params_.delta_eff();
    const Cplx undo = double(out.epsilon) * Cplx(0.0, 1.0) *
                      std::exp(Cplx(0.0, -d * schedule_.t_a));
    const Cplx rho10 = undo * rho[1][0];
    out.fidelity = q.alpha2() * rho[0][0].real() +
                   q.beta2() * rho[1][1].real() +
                   2.0 * (std::conj(q.beta) * q.alpha * rho10).real();
  }
  return out;
}

RunOutcome run_trajectory(const SystemParams& p, const PulseSchedule& s,
                          const InputQubit& q, const DetectorModel& det,
                          qdyn::Model model, RngStream& rng, int n_max) {
  const TrajectoryEngine engine(p, s, det, model, n_max);
  return engine.run(q, rng);
}

}  // namespace cavtel::protocol
