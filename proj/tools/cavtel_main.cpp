// Command-line front end: closed-form sweeps, Monte Carlo estimation,
// schedule fine-tuning and an invariant self-check.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 failed check.

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cavtel/config.hpp"
#include "cavtel/csv.hpp"
#include "cavtel/kernels.hpp"
#include "cavtel/optimize.hpp"

namespace {

using namespace cavtel;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;  // empty -> stdout
  bool seed_set = false;
  std::uint64_t seed = 0;
  bool threads_set = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "key=value configuration file");
  cmd->add_option("--set", args.overrides,
                  "override a configuration key (key=value, repeatable)");
  cmd->add_option("--out", args.out_path, "output CSV path (default stdout)");
  cmd->add_option("--seed", args.seed, "override the random seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--threads", args.threads,
                  "worker threads (0 = hardware)")
      ->each([&args](const std::string&) { args.threads_set = true; });
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = load_config_file(args.config_path);
  for (const auto& ov : args.overrides) apply_override(cfg, ov);
  if (args.seed_set) cfg.seed = args.seed;
  if (args.threads_set) cfg.n_threads = args.threads;
  return cfg;
}

void emit(const CommonArgs& args, const csv::Writer& w) {
  if (args.out_path.empty())
    std::cout << w.str();
  else
    w.write_file(args.out_path);
}

// Analytic figures for one kappa (modified and original schedules).
int cmd_sweep_kappa(const CommonArgs& args, double lo, double hi, int steps) {
  const RunConfig cfg = resolve_config(args);
  const auto det = detector_kind(cfg);
  csv::Writer w({"kappa_mhz", "t_a_us", "t_b_us", "psuc_modified",
                 "fbar_modified", "fbar_conditional_modified",
                 "psuc_original", "fbar_conditional_original"});
  for (int i = 0; i < steps; ++i) {
    const double kappa =
        steps == 1 ? lo : lo + (hi - lo) * double(i) / double(steps - 1);
    RunConfig c = cfg;
    c.kappa_mhz = kappa;
    const auto p = system_params(c);
    if (!p.underdamped()) {
      w.comment("skipped overdamped kappa_mhz=" + csv::format_number(kappa));
      continue;
    }
    const auto sm =
        analytic::make_schedule(p, analytic::ProtocolMode::Modified,
                                c.t_d_factor, c.branch_n);
    const auto so =
        analytic::make_schedule(p, analytic::ProtocolMode::Original,
                                c.t_d_factor, c.branch_n);
    w.begin_row()
        .col(kappa)
        .col(sm.t_a)
        .col(sm.t_b)
        .col(analytic::success_probability(p, sm))
        .col(analytic::average_fidelity(p, sm, c.eta, det))
        .col(1.0)  // coherent branch of the modified protocol is exact
        .col(analytic::success_probability(p, so))
        .col(analytic::haar_success_fidelity(p, so))
        .end_row();
  }
  emit(args, w);
  return 0;
}

// Averaged success/fidelity laws against the detection efficiency.
int cmd_sweep_eta(const CommonArgs& args, double lo, double hi, int steps,
                  bool log_spacing) {
  const RunConfig cfg = resolve_config(args);
  const auto p = system_params(cfg);
  const auto s = schedule(cfg);
  csv::Writer w({"eta", "psuc_resolving", "psuc_conventional",
                 "fbar_resolving", "fbar_conventional"});
  if (log_spacing && lo <= 0.0) throw ConfigError("log spacing needs eta > 0");
  for (int i = 0; i < steps; ++i) {
    const double f = steps == 1 ? 0.0 : double(i) / double(steps - 1);
    const double eta =
        log_spacing ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
    w.begin_row()
        .col(eta)
        .col(analytic::average_success(p, s, eta,
                                       analytic::DetectorKind::Resolving))
        .col(analytic::average_success(p, s, eta,
                                       analytic::DetectorKind::Conventional))
        .col(analytic::average_fidelity(p, s, eta,
                                        analytic::DetectorKind::Resolving))
        .col(analytic::average_fidelity(p, s, eta,
                                        analytic::DetectorKind::Conventional))
        .end_row();
  }
  emit(args, w);
  return 0;
}

int cmd_estimate(const CommonArgs& args) {
  const RunConfig cfg = resolve_config(args);
  const auto p = system_params(cfg);
  const auto s = schedule(cfg);
  const auto det = detector_model(cfg);
  const auto ens = input_ensemble(cfg);

  csv::Writer w({"backend", "n_runs", "n_success", "n_contaminated",
                 "n_no_click", "n_double_click", "success_mean", "success_se",
                 "fidelity_mean", "fidelity_se", "fidelity_inputs"});
  if (cfg.backend == "analytic") {
    // closed-form expectation, averaged over the same ensemble
    double suc = 0.0, fid = 0.0;
    int fid_inputs = 0;
    for (int i = 0; i < ens.count; ++i) {
      const auto q = ens.input(i, cfg.seed);
      const auto probs = protocol::run_analytic(p, s, q, det);
      suc += probs.indicated();
      if (probs.indicated() > 0.0) {
        fid += probs.average_fidelity();
        ++fid_inputs;
      }
    }
    w.begin_row()
        .col(std::string("analytic"))
        .col(std::uint64_t(0))
        .col(std::uint64_t(0))
        .col(std::uint64_t(0))
        .col(std::uint64_t(0))
        .col(std::uint64_t(0))
        .col(suc / double(ens.count))
        .col(0.0)
        .col(fid_inputs ? fid / double(fid_inputs) : 0.0)
        .col(0.0)
        .col(fid_inputs)
        .end_row();
  } else if (cfg.backend == "trajectory") {
    const protocol::TrajectoryEngine engine(p, s, det, dynamics_model(cfg),
                                            cfg.n_max);
    estimate::EstimateOptions opt;
    opt.seed = cfg.seed;
    opt.n_traj = cfg.n_traj;
    opt.n_threads = cfg.n_threads;
    const auto est = estimate_protocol(engine, ens, opt);
    w.begin_row()
        .col(std::string("trajectory"))
        .col(est.n_runs)
        .col(est.n_success)
        .col(est.n_contaminated)
        .col(est.n_no_click)
        .col(est.n_double_click)
        .col(est.success.mean)
        .col(est.success.std_error)
        .col(est.fidelity.mean)
        .col(est.fidelity.std_error)
        .col(est.n_fidelity_inputs)
        .end_row();
  } else {
    throw ConfigError("backend must be 'analytic' or 'trajectory', got '" +
                      cfg.backend + "'");
  }
  emit(args, w);
  return 0;
}

int cmd_optimize(const CommonArgs& args, int max_evals, double bounds_frac) {
  const RunConfig cfg = resolve_config(args);
  const auto p = system_params(cfg);
  optimize::TuneOptions opt;
  opt.seed = cfg.seed;
  opt.model = dynamics_model(cfg);
  opt.n_max = cfg.n_max;
  opt.t_d_factor = cfg.t_d_factor;
  opt.max_evals = max_evals;
  opt.bounds_frac = bounds_frac;
  opt.n_inputs = cfg.n_states;
  opt.n_traj = cfg.n_traj;
  const auto res =
      optimize::fine_tune(p, protocol_mode(cfg), detector_model(cfg), opt);
  csv::Writer w({"t_a_us", "t_b_us", "objective", "seed_t_a_us", "seed_t_b_us",
                 "seed_objective", "n_evals", "improved"});
  w.begin_row()
      .col(res.schedule.t_a)
      .col(res.schedule.t_b)
      .col(res.objective)
      .col(res.seed_schedule.t_a)
      .col(res.seed_schedule.t_b)
      .col(res.seed_objective)
      .col(res.n_evals)
      .col(int(res.improved))
      .end_row();
  emit(args, w);
  return 0;
}

struct CheckDef {
  std::string name;
  double residual;
  double bound;
};

int cmd_check(const CommonArgs& args) {
  const RunConfig cfg = resolve_config(args);
  const auto p = system_params(cfg);
  const auto mode = protocol_mode(cfg);
  std::vector<CheckDef> checks;

  // damping compensation at the scheduled Bob time
  {
    const auto s = schedule(cfg);
    const double r = (mode == analytic::ProtocolMode::Modified)
                         ? std::abs(analytic::compensation_residual(p, s))
                         : std::abs(analytic::amp_a(p, s.t_b) -
                                    analytic::amp_b(p, s.t_b));
    checks.push_back({"pulse-matching-condition", r, 1e-9});
  }
  // mapping completeness b(t_a) = 0
  {
    const auto s = schedule(cfg);
    checks.push_back(
        {"mapping-condition", std::abs(analytic::amp_b(p, s.t_a)), 1e-9});
  }
  // closed-form one-click law vs the time-resolved quadrature
  {
    auto s = schedule(cfg);
    s.t_d = 14.0 / p.kappa;  // long window: quadrature approaches the law
    const auto q = analytic::InputQubit::from_beta2(0.5);
    const double law = analytic::success_probability(p, s);
    const double quad = analytic::success_probability_quadrature(p, s, q);
    checks.push_back({"click-integral-vs-law", std::abs(quad - law),
                      1e-6 * std::max(law, 1e-12) + 2e-12});
  }
  // collapse channels complete the damping of both models
  for (auto model : {qdyn::Model::Adiabatic, qdyn::Model::Full}) {
    qdyn::HamiltonianSpec spec;
    spec.params = p;
    spec.model = model;
    spec.n_max = cfg.n_max;
    const auto h = qdyn::build_hamiltonian(spec);
    const auto channels = qdyn::build_collapse_channels(p, model, cfg.n_max);
    Operator sum = Operator::zero(cfg.n_max);
    for (const auto& ch : channels)
      sum.add_scaled(1.0, ch.op.dagger() * ch.op);
    // i(H - H^dag) equals the channel sum, so the difference vanishes
    Operator anti = Operator::zero(cfg.n_max);
    anti.add_scaled(Cplx{0.0, -1.0}, h);
    anti.add_scaled(Cplx{0.0, 1.0}, h.dagger());
    sum.add_scaled(1.0, anti);
    checks.push_back(
        {std::string("channel-completeness-") +
             (model == qdyn::Model::Full ? "full" : "adiabatic"),
         sum.max_abs(), 1e-10 * std::max(1.0, h.max_abs())});
  }
  // outcome distribution normalization across detector kinds
  {
    const auto s = schedule(cfg);
    double worst = 0.0;
    for (auto kind :
         {analytic::DetectorKind::Resolving,
          analytic::DetectorKind::Conventional}) {
      for (double beta2 : {0.0, 0.3, 0.7, 1.0}) {
        protocol::DetectorModel det;
        det.kind = kind;
        det.eta = cfg.eta;
        const auto probs = protocol::run_analytic(
            p, s, analytic::InputQubit::from_beta2(beta2), det);
        const double sum = probs.indicated() + probs.no_click +
                           probs.double_click;
        worst = std::max(worst, std::abs(sum - 1.0));
        worst = std::max(worst, std::max(0.0, -probs.no_click));
        worst = std::max(worst, std::max(0.0, -probs.double_click));
      }
    }
    checks.push_back({"outcome-normalization", worst, 1e-12});
  }
  // kernel backends agree (when a SIMD backend exists)
  {
    double worst = 0.0;
    if (kernels::avx2_available()) {
      const int n = 17;
      std::vector<kernels::Cplx> a(n * n), x(n), y0(n), y1(n);
      RngStream rng(7, 7);
      for (auto& v : a) v = {rng.uniform() - 0.5, rng.uniform() - 0.5};
      for (auto& v : x) v = {rng.uniform() - 0.5, rng.uniform() - 0.5};
      kernels::detail::matvec_scalar(a.data(), x.data(), y0.data(), n);
      const auto saved = kernels::active_backend();
      kernels::set_backend(kernels::Backend::Avx2);
      kernels::matvec(a.data(), x.data(), y1.data(), n);
      kernels::set_backend(saved);
      for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(y0[i] - y1[i]));
    }
    checks.push_back({"kernel-backend-agreement", worst, 1e-12});
  }

  bool all_ok = true;
  for (const auto& c : checks) {
    const bool ok = c.residual <= c.bound;
    all_ok = all_ok && ok;
    std::printf("%-28s %s  residual=%.3e bound=%.3e\n", c.name.c_str(),
                ok ? "ok  " : "FAIL", c.residual, c.bound);
  }
  return all_ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cavity-decay teleportation calculator"};
  app.require_subcommand(1);

  CommonArgs common;
  double kappa_lo = 0.5, kappa_hi = 8.0, eta_lo = 1e-4, eta_hi = 1.0;
  int steps = 20;
  bool log_eta = false;
  int max_evals = 60;
  double bounds_frac = 0.30;

  auto* sk = app.add_subcommand("sweep-kappa",
                                "closed-form figures vs cavity decay rate");
  add_common(sk, common);
  sk->add_option("--kappa-min", kappa_lo, "lowest kappa/2pi (MHz)");
  sk->add_option("--kappa-max", kappa_hi, "highest kappa/2pi (MHz)");
  sk->add_option("--steps", steps, "number of sweep points");

  auto* se = app.add_subcommand("sweep-eta",
                                "averaged laws vs detection efficiency");
  add_common(se, common);
  se->add_option("--eta-min", eta_lo, "lowest efficiency");
  se->add_option("--eta-max", eta_hi, "highest efficiency");
  se->add_option("--steps", steps, "number of sweep points");
  se->add_flag("--log", log_eta, "logarithmic eta spacing");

  auto* es = app.add_subcommand("estimate",
                                "Monte Carlo (or closed-form) estimate");
  add_common(es, common);

  auto* op = app.add_subcommand("optimize", "fine-tune the pulse schedule");
  add_common(op, common);
  op->add_option("--max-evals", max_evals, "objective evaluation budget");
  op->add_option("--bounds-frac", bounds_frac,
                 "search box half-width around the seed");

  auto* ck = app.add_subcommand("check", "run the invariant self-checks");
  add_common(ck, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sk->parsed()) return cmd_sweep_kappa(common, kappa_lo, kappa_hi, steps);
    if (se->parsed())
      return cmd_sweep_eta(common, eta_lo, eta_hi, steps, log_eta);
    if (es->parsed()) return cmd_estimate(common);
    if (op->parsed()) return cmd_optimize(common, max_evals, bounds_frac);
    if (ck->parsed()) return cmd_check(common);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
