#include "cavtel/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace cavtel::optimize {

namespace {

struct Vertex {
  double ta = 0.0, tb = 0.0;
  double value = 0.0;  // objective, maximized
};

}  // namespace

TuneResult fine_tune(const analytic::SystemParams& p,
                     analytic::ProtocolMode mode,
                     const protocol::DetectorModel& det,
                     const TuneOptions& opt) {
  if (opt.bounds_frac <= 0.0 || opt.bounds_frac >= 1.0)
    throw std::invalid_argument("bounds_frac must lie in (0, 1)");
  if (opt.max_evals < 4)
    throw std::invalid_argument("max_evals must be at least 4");

  const auto seed_sched = analytic::make_schedule(p, mode, opt.t_d_factor);
  const double ta0 = seed_sched.t_a, tb0 = seed_sched.t_b;
  const double ta_lo = ta0 * (1.0 - opt.bounds_frac);
  const double ta_hi = ta0 * (1.0 + opt.bounds_frac);
  const double tb_lo = tb0 * (1.0 - opt.bounds_frac);
  const double tb_hi = tb0 * (1.0 + opt.bounds_frac);

  estimate::InputEnsemble ens;
  ens.kind = estimate::EnsembleKind::Haar;
  ens.count = opt.n_inputs;
  estimate::EstimateOptions eopt;
  eopt.seed = opt.seed;
  eopt.n_traj = opt.n_traj;
  eopt.n_threads = 1;

  int n_evals = 0;
  const auto evaluate = [&](double ta, double tb) {
    ta = std::clamp(ta, ta_lo, ta_hi);
    tb = std::clamp(tb, tb_lo, tb_hi);
    analytic::PulseSchedule s{ta, std::min(tb, ta), opt.t_d_factor / p.kappa};
    const protocol::TrajectoryEngine engine(p, s, det, opt.model, opt.n_max);
    const auto est = estimate_protocol(engine, ens, eopt);
    ++n_evals;
    if (est.n_fidelity_inputs == 0) return 0.0;
    return opt.objective == Objective::ConditionalFidelity
               ? est.fidelity.mean
               : est.fidelity.mean * est.success.mean;
  };

  // Nelder-Mead (maximizing), clamped to the box.
  std::array<Vertex, 3> vx;
  vx[0] = {ta0, tb0, evaluate(ta0, tb0)};
  const double seed_value = vx[0].value;
  vx[1] = {ta0 * 1.08, tb0, evaluate(ta0 * 1.08, tb0)};
  vx[2] = {ta0, tb0 * 1.08, evaluate(ta0, tb0 * 1.08)};

  const auto order = [&] {
    std::sort(vx.begin(), vx.end(),
              [](const Vertex& l, const Vertex& r) { return l.value > r.value; });
  };
  order();
  while (n_evals < opt.max_evals) {
    const double diam =
        std::max({std::abs(vx[0].ta - vx[1].ta), std::abs(vx[0].ta - vx[2].ta),
                  std::abs(vx[0].tb - vx[1].tb) * (ta0 / tb0),
                  std::abs(vx[0].tb - vx[2].tb) * (ta0 / tb0)});
    if (diam < opt.simplex_tol * ta0) break;

    const double cta = 0.5 * (vx[0].ta + vx[1].ta);
    const double ctb = 0.5 * (vx[0].tb + vx[1].tb);
    const double rta = cta + (cta - vx[2].ta);
    const double rtb = ctb + (ctb - vx[2].tb);
    const double rv = evaluate(rta, rtb);
    if (rv > vx[0].value) {
      const double eta_ = cta + 2.0 * (cta - vx[2].ta);
      const double etb = ctb + 2.0 * (ctb - vx[2].tb);
      const double ev = (n_evals < opt.max_evals) ? evaluate(eta_, etb) : rv;
      vx[2] = (ev > rv) ? Vertex{eta_, etb, ev} : Vertex{rta, rtb, rv};
    } else if (rv > vx[1].value) {
      vx[2] = {rta, rtb, rv};
    } else {
      const double kta = cta + 0.5 * (vx[2].ta - cta);
      const double ktb = ctb + 0.5 * (vx[2].tb - ctb);
      const double kv =
          (n_evals < opt.max_evals) ? evaluate(kta, ktb) : vx[2].value;
      if (kv > vx[2].value) {
        vx[2] = {kta, ktb, kv};
      } else {
        // shrink toward the best vertex
        for (int i = 1; i < 3; ++i) {
          vx[i].ta = vx[0].ta + 0.5 * (vx[i].ta - vx[0].ta);
          vx[i].tb = vx[0].tb + 0.5 * (vx[i].tb - vx[0].tb);
          if (n_evals < opt.max_evals)
            vx[i].value = evaluate(vx[i].ta, vx[i].tb);
        }
      }
    }
    order();
  }

  TuneResult res;
  res.seed_schedule = seed_sched;
  res.seed_objective = seed_value;
  res.schedule = {std::clamp(vx[0].ta, ta_lo, ta_hi),
                  std::clamp(vx[0].tb, tb_lo, tb_hi), opt.t_d_factor / p.kappa};
  res.schedule.t_b = std::min(res.schedule.t_b, res.schedule.t_a);
  res.objective = vx[0].value;
  res.n_evals = n_evals;
  res.improved = vx[0].value > seed_value;
  return res;
}

}  // namespace cavtel::optimize
