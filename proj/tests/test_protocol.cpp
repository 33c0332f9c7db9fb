#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "cavtel/analytic.hpp"
#include "cavtel/protocol.hpp"
#include "cavtel/rng.hpp"
#include "doctest.h"

using namespace cavtel;
using namespace cavtel::protocol;
using analytic::InputQubit;
using analytic::ProtocolMode;

namespace {

Click win(double t, int detector) { return Click{t, detector, false}; }

const double kTa = 0.1;  // classification boundary for the unit cases

Classification cls_of(std::vector<Click> clicks, DetectorKind kind,
                      int n_emissions, int* eps = nullptr) {
  return classify(clicks, kTa, kind, n_emissions, eps);
}

}  // namespace

TEST_CASE("record classification") {
  const auto conv = DetectorKind::Conventional;
  const auto res = DetectorKind::Resolving;
  int eps = 99;

  CHECK(cls_of({}, conv, 0) == Classification::NoClick);
  // any preparation click aborts the run
  CHECK(cls_of({win(0.02, +1)}, conv, 1) == Classification::NoClick);
  CHECK(cls_of({win(0.02, +1), win(0.15, -1)}, conv, 2) ==
        Classification::DoubleClick);
  CHECK(cls_of({win(0.02, +1), win(0.05, +1)}, res, 2) ==
        Classification::DoubleClick);

  CHECK(cls_of({win(0.15, +1)}, conv, 1, &eps) == Classification::Success);
  CHECK(eps == +1);
  CHECK(cls_of({win(0.15, -1)}, res, 2, &eps) ==
        Classification::ContaminatedSuccess);
  CHECK(eps == -1);

  // conventional detectors are binary: repeated hits on one detector merge
  CHECK(cls_of({win(0.15, +1), win(0.18, +1)}, conv, 2, &eps) ==
        Classification::ContaminatedSuccess);
  CHECK(eps == +1);
  CHECK(cls_of({win(0.15, +1), win(0.18, -1)}, conv, 2) ==
        Classification::DoubleClick);
  // number-resolving detectors reject any window pair
  CHECK(cls_of({win(0.15, +1), win(0.18, +1)}, res, 2) ==
        Classification::DoubleClick);
  CHECK(cls_of({win(0.15, +1), win(0.18, -1)}, res, 2) ==
        Classification::DoubleClick);

  // a lone dark count is indistinguishable from a success indication
  CHECK(classify({Click{0.15, +1, true}}, kTa, res, 0, &eps) ==
        Classification::Success);
  CHECK(eps == +1);
}

TEST_CASE("closed-form outcome distribution is normalized and symmetric") {
  const auto p = analytic::SystemParams::from_mhz(100.0, 16.0, 16.0, 3.8);
  for (ProtocolMode mode : {ProtocolMode::Modified, ProtocolMode::Original}) {
    const auto s = analytic::make_schedule(p, mode);
    for (double beta2 : {0.0, 0.25, 0.5, 0.9, 1.0})
      for (double eta : {0.05, 0.4, 1.0})
        for (DetectorKind kind :
             {DetectorKind::Resolving, DetectorKind::Conventional}) {
          const auto q = InputQubit::from_beta2(beta2);
          const auto out = run_analytic(p, s, q, DetectorModel{kind, eta});
          CHECK(out.success_plus == doctest::Approx(out.success_minus));
          const double total = out.success_plus + out.success_minus +
                               out.contaminated + out.no_click +
                               out.double_click;
          CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
          CHECK(out.no_click >= -1e-12);
          CHECK(out.double_click >= -1e-12);
          CHECK(out.contaminated >= -1e-12);
        }
  }
}

TEST_CASE("contamination matches the two-photon law under compensation") {
  const auto p = analytic::SystemParams::from_mhz(100.0, 16.0, 16.0, 3.8);
  const auto s = analytic::make_schedule(p, ProtocolMode::Modified);
  for (double beta2 : {0.2, 0.5, 0.8})
    for (double eta : {0.05, 0.5, 0.95, 1.0})
      for (DetectorKind kind :
           {DetectorKind::Resolving, DetectorKind::Conventional}) {
        const auto q = InputQubit::from_beta2(beta2);
        const auto out = run_analytic(p, s, q, DetectorModel{kind, eta});
        const double law = analytic::two_photon_prob(p, s, beta2, eta, kind);
        CHECK(out.contaminated == doctest::Approx(law).epsilon(1e-12));
      }
  // ideal number-resolving detectors never mistake a photon pair
  const auto out = run_analytic(p, s, InputQubit::from_beta2(0.5),
                                DetectorModel{DetectorKind::Resolving, 1.0});
  CHECK(out.contaminated == doctest::Approx(0.0));
  CHECK(out.success_plus + out.success_minus ==
        doctest::Approx(analytic::success_probability(p, s)).epsilon(1e-12));
}

TEST_CASE("indicated-success at the balanced input matches the average law") {
  const auto p = analytic::SystemParams::from_mhz(62.5, 16.0, 16.0, 4.0);
  const auto s = analytic::make_schedule(p, ProtocolMode::Modified);
  const auto q = InputQubit::from_beta2(0.5);
  for (double eta : {0.05, 0.5, 1.0})
    for (DetectorKind kind :
         {DetectorKind::Resolving, DetectorKind::Conventional}) {
      const auto out = run_analytic(p, s, q, DetectorModel{kind, eta});
      CHECK(out.indicated() ==
            doctest::Approx(analytic::average_success(p, s, eta, kind))
                .epsilon(1e-12));
    }
}

TEST_CASE("conditional fidelity of the closed-form distribution") {
  const auto p = analytic::SystemParams::from_mhz(100.0, 16.0, 16.0, 3.8);
  const auto s = analytic::make_schedule(p, ProtocolMode::Modified);
  const auto q = InputQubit::from_beta2(0.5);
  const DetectorKind conv = DetectorKind::Conventional;
  // frozen values of (2 S f_s + C f_c) / (2 S + C) at beta^2 = 1/2
  CHECK(run_analytic(p, s, q, DetectorModel{conv, 0.05}).average_fidelity() ==
        doctest::Approx(0.838388886034).epsilon(1e-9));
  CHECK(run_analytic(p, s, q, DetectorModel{conv, 0.5}).average_fidelity() ==
        doctest::Approx(0.899198805489).epsilon(1e-9));
  CHECK(run_analytic(p, s, q, DetectorModel{conv, 1.0}).average_fidelity() ==
        doctest::Approx(0.998793617348).epsilon(1e-9));
}

TEST_CASE("closed form rejects schedules that break the mapping condition") {
  const auto p = analytic::SystemParams::from_mhz(100.0, 16.0, 16.0, 3.8);
  auto s = analytic::make_schedule(p, ProtocolMode::Modified);
  s.t_a *= 0.9;
  CHECK_THROWS_AS(run_analytic(p, s, InputQubit::from_beta2(0.5),
                               DetectorModel{}),
                  std::invalid_argument);
}

TEST_CASE("engine validation") {
  const auto p = analytic::SystemParams::from_mhz(62.5, 16.0, 16.0, 4.0);
  auto s = analytic::make_schedule(p, ProtocolMode::Modified);
  CHECK_THROWS_AS(TrajectoryEngine(p, PulseSchedule{s.t_b, s.t_a, s.t_d},
                                   DetectorModel{}, qdyn::Model::Adiabatic),
                  std::invalid_argument);
  DetectorModel bad;
  bad.eta = 1.2;
  CHECK_THROWS_AS(TrajectoryEngine(p, s, bad, qdyn::Model::Adiabatic),
                  std::invalid_argument);
}

TEST_CASE("trajectory outcomes against the closed-form distribution") {
  const auto p = analytic::SystemParams::from_mhz(62.5, 16.0, 16.0, 4.0);
  const auto s = analytic::make_schedule(p, ProtocolMode::Modified, 8.0);
  const auto q = InputQubit::from_beta2(0.7);
  const DetectorModel det{DetectorKind::Conventional, 0.5, 0.0};
  const auto law = run_analytic(p, s, q, det);

  const TrajectoryEngine engine(p, s, det, qdyn::Model::Adiabatic);
  const int n = 4000;
  int n_success = 0, n_plus = 0, n_cont = 0, n_dbl = 0;
  for (int k = 0; k < n; ++k) {
    RngStream rng(987, std::uint64_t(k));
    const auto out = engine.run(q, rng);
    switch (out.cls) {
      case Classification::Success:
        ++n_success;
        if (out.epsilon > 0) ++n_plus;
        // the coherent branch teleports exactly under compensation
        CHECK(out.fidelity > 1.0 - 1e-5);
        CHECK(out.n_emissions == 1);
        break;
      case Classification::ContaminatedSuccess:
        ++n_cont;
        CHECK(out.n_emissions == 2);
        // both excitations left: Bob holds |0> and the fidelity is alpha^2
        CHECK(out.bob_ground);
        CHECK(out.fidelity == doctest::Approx(q.alpha2()).epsilon(1e-7));
        break;
      case Classification::DoubleClick:
        ++n_dbl;
        break;
      case Classification::NoClick:
        break;
    }
    CHECK(out.n_spont == 0);
  }

  auto within = [&](double count, double prob, const char* what) {
    const double sd = std::sqrt(prob * (1.0 - prob) * n);
    INFO(what << ": " << count << " expected " << prob * n << " +- " << sd);
    CHECK(std::abs(count - prob * n) < 5.0 * sd + 1.0);
  };
  within(n_success, law.success_plus + law.success_minus, "success");
  within(n_cont, law.contaminated, "contaminated");
  within(n_dbl, law.double_click, "double click");
  within(n_plus, 0.5 * (law.success_plus + law.success_minus), "D+ share");
}

TEST_CASE("original pulse length leaves the damping distortion in place") {
  const auto p = analytic::SystemParams::from_mhz(62.5, 16.0, 16.0, 4.0);
  const auto s = analytic::make_schedule(p, ProtocolMode::Original, 8.0);
  const auto q = InputQubit::from_beta2(0.37);
  const DetectorModel det{DetectorKind::Resolving, 1.0, 0.0};
  const double f_law = analytic::success_fidelity(p, s, q);
  CHECK(f_law < 1.0 - 1e-3);

  const TrajectoryEngine engine(p, s, det, qdyn::Model::Adiabatic);
  int n_success = 0;
  for (int k = 0; k < 3000; ++k) {
    RngStream rng(1234, std::uint64_t(k));
    const auto out = engine.run(q, rng);
    if (out.cls != Classification::Success) continue;
    ++n_success;
    CHECK(out.fidelity == doctest::Approx(f_law).epsilon(1e-5));
  }
  CHECK(n_success > 100);
}

TEST_CASE("dark counts populate the record even at zero efficiency") {
  const auto p = analytic::SystemParams::from_mhz(62.5, 16.0, 16.0, 4.0);
  const auto s = analytic::make_schedule(p, ProtocolMode::Modified);
  DetectorModel det{DetectorKind::Resolving, 0.0, 4.0e5};
  const TrajectoryEngine engine(p, s, det, qdyn::Model::Adiabatic);
  const auto q = InputQubit::from_beta2(0.5);

  const double total = s.t_a + s.t_d;
  const double m = det.dark_rate_hz * 1e-6 * total;  // mean per detector
  const double p_single = 2.0 * m * std::exp(-2.0 * m) * (s.t_d / total);
  const double p_double = 1.0 - std::exp(-2.0 * m) * (1.0 + 2.0 * m);

  const int n = 3000;
  int n_single = 0, n_dbl = 0;
  for (int k = 0; k < n; ++k) {
    RngStream rng(55, std::uint64_t(k));
    const auto out = engine.run(q, rng);
    CHECK(out.n_emissions <= 2);
    for (const auto& c : out.clicks) CHECK(c.dark);
    // a lone dark click in the window indicates (possibly contaminated)
    // success regardless of what the cavities actually did
    if (out.cls == Classification::Success ||
        out.cls == Classification::ContaminatedSuccess) {
      ++n_single;
    } else if (out.cls == Classification::DoubleClick) {
      ++n_dbl;
    }
  }
  const double sd1 = std::sqrt(p_single * (1.0 - p_single) * n);
  const double sd2 = std::sqrt(p_double * (1.0 - p_double) * n);
  CHECK(std::abs(n_single - p_single * n) < 5.0 * sd1);
  CHECK(std::abs(n_dbl - p_double * n) < 5.0 * sd2);
}

TEST_CASE("full model smoke test") {
  const auto p = analytic::SystemParams::from_mhz(62.5, 16.0, 16.0, 4.0, 2.6);
  const auto s = analytic::make_schedule(p, ProtocolMode::Modified, 8.0);
  const DetectorModel det{DetectorKind::Resolving, 1.0, 0.0};
  const TrajectoryEngine engine(p, s, det, qdyn::Model::Full);
  const auto q = InputQubit::from_beta2(0.5);

  int n_success = 0, n_spont_runs = 0;
  double fid_sum = 0.0;
  for (int k = 0; k < 600; ++k) {
    RngStream rng(777, std::uint64_t(k));
    const auto out = engine.run(q, rng);
    if (out.n_spont > 0) ++n_spont_runs;
    if (out.cls == Classification::Success) {
      ++n_success;
      fid_sum += out.fidelity;
      CHECK(out.fidelity <= 1.0 + 1e-9);
    }
  }
  CHECK(n_success > 25);
  CHECK(n_spont_runs > 0);
  // adiabaticity and spontaneous-decay contamination cost a few percent
  CHECK(fid_sum / double(n_success) > 0.75);
}
