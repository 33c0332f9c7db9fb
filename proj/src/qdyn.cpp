#include "cavtel/qdyn.hpp"

#include <cmath>
#include <stdexcept>

namespace cavtel::qdyn {

namespace {

const Cplx kI{0.0, 1.0};

// side contribution to the full-model Hamiltonian:
//   (Delta - i gamma) |2><2| + Omega(|2><1| + |1><2|)
//   + g(a |2><0| + a^dag |0><2|) - i kappa a^dag a
void add_full_side(Operator& h, const analytic::SystemParams& p, Side s,
                   bool laser, int n_max) {
  h.add_scaled(Cplx{p.delta, -p.gamma}, build_flip(n_max, s, 2, 2));
  if (laser) {
    h.add_scaled(p.omega, build_flip(n_max, s, 2, 1));
    h.add_scaled(p.omega, build_flip(n_max, s, 1, 2));
  }
  const Operator a = build_annihilation(n_max, s);
  const Operator s20 = build_flip(n_max, s, 2, 0);
  h.add_scaled(p.g, a * s20);
  h.add_scaled(p.g, (a * s20).dagger());
  h.add_scaled(Cplx{0.0, -p.kappa}, build_number(n_max, s));
}

// adiabatic reduction (valid for omega == g), with d = g^2/Delta:
//   laser on:  -d |1><1| - d n |0><0| - d(a |1><0| + a^dag |0><1|) - i kappa n
//   laser off: -d n |0><0| - i kappa n
void add_adiabatic_side(Operator& h, const analytic::SystemParams& p, Side s,
                        bool laser, int n_max) {
  const double d = p.delta_eff();
  const Operator n_op = build_number(n_max, s);
  h.add_scaled(-d, n_op * build_flip(n_max, s, 0, 0));
  if (laser) {
    h.add_scaled(-d, build_flip(n_max, s, 1, 1));
    const Operator a10 = build_annihilation(n_max, s) * build_flip(n_max, s, 1, 0);
    h.add_scaled(-d, a10);
    h.add_scaled(-d, a10.dagger());
  }
  h.add_scaled(Cplx{0.0, -p.kappa}, n_op);
}

}  // namespace

Operator build_hamiltonian(const HamiltonianSpec& spec) {
  spec.params.validate();
  if (spec.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (spec.model == Model::Adiabatic) {
    const double rel = std::abs(spec.params.omega - spec.params.g) /
                       std::max(spec.params.omega, spec.params.g);
    if (rel > 1e-12)
      throw std::invalid_argument(
          "the adiabatic reduction requires omega == g");
  }
  Operator h = Operator::zero(spec.n_max);
  if (spec.model == Model::Full) {
    add_full_side(h, spec.params, Side::A, spec.laser_a, spec.n_max);
    add_full_side(h, spec.params, Side::B, spec.laser_b, spec.n_max);
  } else {
    add_adiabatic_side(h, spec.params, Side::A, spec.laser_a, spec.n_max);
    add_adiabatic_side(h, spec.params, Side::B, spec.laser_b, spec.n_max);
  }
  return h;
}

std::vector<CollapseChannel> build_collapse_channels(
    const analytic::SystemParams& p, Model model, int n_max,
    double branch_to_0) {
  if (branch_to_0 < 0.0 || branch_to_0 > 1.0)
    throw std::invalid_argument("branching fraction must lie in [0, 1]");
  std::vector<CollapseChannel> out;
  const double rk = std::sqrt(p.kappa);
  const Operator a_a = build_annihilation(n_max, Side::A);
  const Operator a_b = build_annihilation(n_max, Side::B);

  Operator dp = Operator::zero(n_max);
  dp.add_scaled(rk, a_a);
  dp.add_scaled(rk * kI, a_b);
  out.push_back({"D+", +1, std::move(dp)});

  Operator dm = Operator::zero(n_max);
  dm.add_scaled(rk, a_a);
  dm.add_scaled(-rk * kI, a_b);
  out.push_back({"D-", -1, std::move(dm)});

  if (model == Model::Full && p.gamma > 0.0) {
    // |2> decays at total rate 2 gamma, split between the ground levels.
    const double r0 = std::sqrt(2.0 * p.gamma * branch_to_0);
    const double r1 = std::sqrt(2.0 * p.gamma * (1.0 - branch_to_0));
    for (Side s : {Side::A, Side::B}) {
      const char* tag = (s == Side::A) ? "A" : "B";
      if (r0 > 0.0) {
        Operator c = Operator::zero(n_max);
        c.add_scaled(r0, build_flip(n_max, s, 0, 2));
        out.push_back({std::string("spont") + tag + "->0", 0, std::move(c)});
      }
      if (r1 > 0.0) {
        Operator c = Operator::zero(n_max);
        c.add_scaled(r1, build_flip(n_max, s, 1, 2));
        out.push_back({std::string("spont") + tag + "->1", 0, std::move(c)});
      }
    }
  }
  return out;
}

JumpResult sample_jump(JointState& psi, const Propagator& prop,
                       Propagator::Workspace& ws,
                       const std::vector<CollapseChannel>& channels,
                       double t_window, RngStream& rng, double time_tol) {
  JumpResult res;
  if (t_window <= 0.0) return res;

  const double u = rng.uniform();  // target survival norm^2, in [0, 1)
  prop.enter(psi, ws);
  if (prop.norm2_at(t_window, ws) > u) {
    prop.state_at(t_window, ws, psi);  // no jump; unnormalized survivor
    return res;
  }

  // norm^2 is 1 at t=0 and below u at t_window; bisect the crossing.
  double lo = 0.0, hi = t_window;
  while (hi - lo > time_tol) {
    const double mid = 0.5 * (lo + hi);
    (prop.norm2_at(mid, ws) > u ? lo : hi) = mid;
  }
  res.jumped = true;
  res.t = 0.5 * (lo + hi);
  prop.state_at(res.t, ws, psi);

  // pick the channel in proportion to ||C_k psi||^2
  JointState cpsi(psi.n_max);
  double total = 0.0;
  std::vector<double> w(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    channels[k].op.apply(psi, cpsi);
    w[k] = cpsi.norm2();
    total += w[k];
  }
  if (!(total > 0.0))
    throw std::runtime_error("norm decayed but no collapse channel fires");
  const double r = rng.uniform() * total;
  double acc = 0.0;
  std::size_t pick = channels.size() - 1;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    acc += w[k];
    if (r < acc) { pick = k; break; }
  }
  res.channel = static_cast<int>(pick);
  channels[pick].op.apply(psi, cpsi);
  cpsi.normalize();
  psi = cpsi;
  return res;
}

}  // namespace cavtel::qdyn
