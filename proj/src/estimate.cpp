#include "cavtel/estimate.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cavtel::estimate {

namespace {

constexpr int kBlock = 2048;  // trajectories per work block

// Input streams live far away from the per-trajectory streams
// (which are the plain indices input*n_traj + k).
constexpr std::uint64_t kInputStreamBase = 0x8000000000000000ull;

struct BlockStat {
  std::uint64_t n_success = 0, n_cont = 0, n_no = 0, n_dbl = 0;
  std::uint64_t n_plus = 0, n_minus = 0;
  double fid_sum = 0.0;
  double fid_sq = 0.0;
};

void kahan_add(double& sum, double& comp, double v) {
  const double y = v - comp;
  const double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

}  // namespace

analytic::InputQubit InputEnsemble::input(int i, std::uint64_t seed) const {
  if (kind == EnsembleKind::Fixed) return fixed;
  RngStream rng(seed, kInputStreamBase + std::uint64_t(i));
  const double beta2 = rng.uniform();
  const double phase = 2.0 * M_PI * rng.uniform();
  return analytic::InputQubit::from_beta2(beta2, phase);
}

ProtocolEstimate estimate_protocol(const protocol::TrajectoryEngine& engine,
                                   const InputEnsemble& ensemble,
                                   const EstimateOptions& opt) {
  if (ensemble.count < 1)
    throw std::invalid_argument("ensemble needs at least one input");
  if (opt.n_traj < 1)
    throw std::invalid_argument("n_traj must be positive");
  ensemble.fixed.validate();

  const int n_inputs = ensemble.count;
  const int n_traj = opt.n_traj;
  const int bpi = (n_traj + kBlock - 1) / kBlock;
  const std::size_t total_blocks = std::size_t(n_inputs) * bpi;

  std::vector<analytic::InputQubit> inputs(n_inputs);
  for (int i = 0; i < n_inputs; ++i) inputs[i] = ensemble.input(i, opt.seed);

  std::vector<BlockStat> stats(total_blocks);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t blk = next.fetch_add(1);
      if (blk >= total_blocks) return;
      const int i = int(blk / bpi);
      const int k0 = int(blk % bpi) * kBlock;
      const int k1 = std::min(k0 + kBlock, n_traj);
      BlockStat st;
      double comp = 0.0;
      for (int k = k0; k < k1; ++k) {
        RngStream rng(opt.seed, std::uint64_t(i) * n_traj + k);
        const auto out = engine.run(inputs[i], rng);
        switch (out.cls) {
          case protocol::Classification::Success: ++st.n_success; break;
          case protocol::Classification::ContaminatedSuccess: ++st.n_cont; break;
          case protocol::Classification::NoClick: ++st.n_no; break;
          case protocol::Classification::DoubleClick: ++st.n_dbl; break;
        }
        if (out.cls == protocol::Classification::Success ||
            out.cls == protocol::Classification::ContaminatedSuccess) {
          (out.epsilon > 0 ? st.n_plus : st.n_minus) += 1;
          kahan_add(st.fid_sum, comp, out.fidelity);
          st.fid_sq += out.fidelity * out.fidelity;
        }
      }
      stats[blk] = st;
    }
  };

  int n_threads = opt.n_threads;
  if (n_threads <= 0)
    n_threads = int(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = int(std::min<std::size_t>(n_threads, total_blocks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Per-input conditional fidelities, combined in input order.
  ProtocolEstimate res;
  std::vector<double> f_in;
  f_in.reserve(n_inputs);
  double last_sq = 0.0;
  std::uint64_t last_n = 0;
  for (int i = 0; i < n_inputs; ++i) {
    double fsum = 0.0, comp = 0.0, fsq = 0.0;
    std::uint64_t ind = 0;
    for (int b = 0; b < bpi; ++b) {
      const auto& st = stats[std::size_t(i) * bpi + b];
      res.n_success += st.n_success;
      res.n_contaminated += st.n_cont;
      res.n_no_click += st.n_no;
      res.n_double_click += st.n_dbl;
      res.n_plus += st.n_plus;
      res.n_minus += st.n_minus;
      kahan_add(fsum, comp, st.fid_sum);
      fsq += st.fid_sq;
      ind += st.n_success + st.n_cont;
    }
    if (ind > 0) {
      f_in.push_back(fsum / double(ind));
      last_sq = fsq;
      last_n = ind;
      ++res.n_fidelity_inputs;
    }
  }
  res.n_runs = std::uint64_t(n_inputs) * n_traj;

  const std::size_t m = f_in.size();
  if (m >= 1) {
    double sum = 0.0, comp = 0.0;
    for (double f : f_in) kahan_add(sum, comp, f);
    res.fidelity.mean = sum / double(m);
    if (m >= 2) {
      double ss = 0.0;
      for (double f : f_in) ss += (f - res.fidelity.mean) *
                                  (f - res.fidelity.mean);
      res.fidelity.std_error = std::sqrt(ss / (double(m) * double(m - 1)));
    } else if (last_n >= 2) {
      // single input: fall back to the within-input spread
      const double meanf = res.fidelity.mean;
      const double var =
          std::max(0.0, (last_sq - double(last_n) * meanf * meanf) /
                            double(last_n - 1));
      res.fidelity.std_error = std::sqrt(var / double(last_n));
    }
  }

  const std::uint64_t n_ind = res.n_success + res.n_contaminated;
  const double p = double(n_ind) / double(res.n_runs);
  res.success.mean = p;
  res.success.std_error = std::sqrt(p * (1.0 - p) / double(res.n_runs));
  return res;
}

}  // namespace cavtel::estimate
