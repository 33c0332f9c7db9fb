#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "cavtel/analytic.hpp"
#include "doctest.h"

using namespace cavtel::analytic;

// Reference values below were produced with an independent arbitrary-
// precision evaluation of the closed forms and are frozen here.

namespace {
const SystemParams kSlow = SystemParams::from_mhz(100.0, 16.0, 16.0, 3.8);
const SystemParams kFast = SystemParams::from_mhz(62.5, 16.0, 16.0, 4.0);
}  // namespace

TEST_CASE("parameter validation and regime classification") {
  CHECK_THROWS_AS(SystemParams::from_mhz(-1, 16, 16, 4), std::invalid_argument);
  CHECK_THROWS_AS(SystemParams::from_mhz(100, 0, 16, 4), std::invalid_argument);
  CHECK(kSlow.underdamped());
  // kappa >= 2 delta_eff: overdamped, no oscillatory solution
  const auto over = SystemParams::from_mhz(100.0, 16.0, 16.0, 5.2);
  CHECK_FALSE(over.underdamped());
  CHECK_THROWS_AS(over.omega_kappa(), std::domain_error);
  CHECK(kSlow.delta_eff() == doctest::Approx(2.0 * M_PI * 2.56).epsilon(1e-12));
}

TEST_CASE("input qubit construction") {
  const auto q = InputQubit::from_beta2(0.3, 0.9);
  CHECK(q.beta2() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(q.alpha2() == doctest::Approx(0.7).epsilon(1e-12));
  q.validate();
  CHECK_THROWS_AS(InputQubit::from_beta2(1.5), std::invalid_argument);
  InputQubit bad;
  bad.alpha = {0.9, 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("pulse schedule against frozen references") {
  CHECK(mapping_time(kSlow) == doctest::Approx(0.223295176684).epsilon(1e-10));
  CHECK(bob_time(kSlow, ProtocolMode::Modified) ==
        doctest::Approx(0.00455559543804).epsilon(1e-10));
  CHECK(bob_time(kSlow, ProtocolMode::Original) ==
        doctest::Approx(0.111647588342).epsilon(1e-10));

  CHECK(mapping_time(kFast) == doctest::Approx(0.0926523540701).epsilon(1e-10));
  CHECK(bob_time(kFast, ProtocolMode::Modified) ==
        doctest::Approx(0.0138452916072).epsilon(1e-10));

  const auto s = make_schedule(kFast, ProtocolMode::Modified);
  CHECK(s.t_d == doctest::Approx(4.0 / kFast.kappa).epsilon(1e-12));
  CHECK(s.t_b < s.t_a);
}

TEST_CASE("mapping empties the atom and fills the photon amplitude") {
  for (const auto* p : {&kSlow, &kFast}) {
    const double ta = mapping_time(*p);
    CHECK(std::abs(amp_b(*p, ta)) < 1e-12);
    // b(t_a) = 0 forces a(t_a) = 1: the excitation is fully mapped
    CHECK(amp_a(*p, ta) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("damping compensation holds across the underdamped range") {
  for (double kappa_mhz : {0.2, 0.9, 1.7, 2.6, 3.3, 4.1, 5.0}) {
    const auto p = SystemParams::from_mhz(62.5, 16.0, 16.0, kappa_mhz);
    const auto s = make_schedule(p, ProtocolMode::Modified);
    CHECK(std::abs(compensation_residual(p, s)) < 1e-12);
    // original mode instead stops at the maximally entangled point
    const auto so = make_schedule(p, ProtocolMode::Original);
    CHECK(amp_a(p, so.t_b) ==
          doctest::Approx(amp_b(p, so.t_b)).epsilon(1e-10));
  }
}

TEST_CASE("mapping time approaches the lossless limit as kappa -> 0") {
  const auto p = SystemParams::from_mhz(62.5, 16.0, 16.0, 1e-9);
  // pi/(2 delta_eff): half a vacuum Rabi period
  CHECK(mapping_time(p) ==
        doctest::Approx(M_PI / (2.0 * p.delta_eff())).epsilon(1e-6));
}

TEST_CASE("amplitudes at Bob's stopping point (frozen)") {
  CHECK(amp_a(kFast, 0.0138452916072) ==
        doctest::Approx(0.350606747291).epsilon(1e-10));
  CHECK(amp_b(kFast, 0.0138452916072) ==
        doctest::Approx(1.12323594696).epsilon(1e-10));
  CHECK(amp_a(kSlow, 0.00455559543804) ==
        doctest::Approx(0.0732470944919).epsilon(1e-10));
}

TEST_CASE("success probability and detector factors (frozen)") {
  const auto ss = make_schedule(kSlow, ProtocolMode::Modified);
  CHECK(success_probability(kSlow, ss) ==
        doctest::Approx(0.00481218870447).epsilon(1e-10));
  CHECK(xi_factor(kSlow, ss, DetectorKind::Conventional) ==
        doctest::Approx(0.995187811296).epsilon(1e-10));
  CHECK(xi_factor(kSlow, ss, DetectorKind::Resolving) == 1.0);

  const auto sf = make_schedule(kFast, ProtocolMode::Modified);
  CHECK(success_probability(kFast, sf) ==
        doctest::Approx(0.0867998613561).epsilon(1e-10));
}

TEST_CASE("coherent channel weight is input independent under compensation") {
  const auto s = make_schedule(kFast, ProtocolMode::Modified);
  const double want = success_probability(kFast, s);
  for (double b2 : {0.0, 0.2, 0.5, 0.9, 1.0})
    CHECK(coherent_channel_weight(kFast, s, InputQubit::from_beta2(b2)) ==
          doctest::Approx(want).epsilon(1e-12));
  // in the original mode it is not
  const auto so = make_schedule(kFast, ProtocolMode::Original);
  const double w0 = coherent_channel_weight(kFast, so, InputQubit::from_beta2(0.1));
  const double w1 = coherent_channel_weight(kFast, so, InputQubit::from_beta2(0.9));
  CHECK(std::abs(w0 - w1) > 1e-3);
}

TEST_CASE("time-resolved click integral reproduces the closed form") {
  for (const auto* p : {&kSlow, &kFast}) {
    auto s = make_schedule(*p, ProtocolMode::Modified);
    s.t_d = 16.0 / p->kappa;  // long window: truncation below 1e-13
    const double law = success_probability(*p, s);
    for (double b2 : {0.0, 0.5, 1.0}) {
      const double quad =
          success_probability_quadrature(*p, s, InputQubit::from_beta2(b2));
      CHECK(quad == doctest::Approx(law).epsilon(1e-7));
    }
  }
}

TEST_CASE("two-photon contamination law (frozen)") {
  const auto s = make_schedule(kSlow, ProtocolMode::Modified);
  CHECK(two_photon_prob(kSlow, s, 0.5, 0.05, DetectorKind::Conventional) ==
        doctest::Approx(0.000114912635911).epsilon(1e-10));
  CHECK(two_photon_prob(kSlow, s, 0.5, 0.5, DetectorKind::Conventional) ==
        doctest::Approx(0.000607559896161).epsilon(1e-10));
  CHECK(two_photon_prob(kSlow, s, 0.5, 1.0, DetectorKind::Conventional) ==
        doctest::Approx(1.16387635519e-05).epsilon(1e-9));
  // resolving detectors reject every double-detection
  CHECK(two_photon_prob(kSlow, s, 0.5, 1.0, DetectorKind::Resolving) == 0.0);
}

TEST_CASE("averaged success probability (frozen)") {
  const auto ss = make_schedule(kSlow, ProtocolMode::Modified);
  CHECK(average_success(kSlow, ss, 0.5, DetectorKind::Conventional) ==
        doctest::Approx(0.0030136542484).epsilon(1e-10));
  const auto sf = make_schedule(kFast, ProtocolMode::Modified);
  CHECK(average_success(kFast, sf, 0.05, DetectorKind::Resolving) ==
        doctest::Approx(0.00665398673355).epsilon(1e-10));
  CHECK(average_success(kFast, sf, 1.0, DetectorKind::Conventional) ==
        doctest::Approx(0.0910283735533).epsilon(1e-10));
}

TEST_CASE("averaged fidelity law (frozen)") {
  const auto sf = make_schedule(kFast, ProtocolMode::Modified);
  CHECK(average_fidelity(kFast, sf, 1e-4, DetectorKind::Resolving) ==
        doctest::Approx(0.793587652215).epsilon(1e-10));
  CHECK(average_fidelity(kFast, sf, 0.5, DetectorKind::Conventional) ==
        doctest::Approx(0.859495829186).epsilon(1e-10));
  CHECK(average_fidelity(kFast, sf, 1.0, DetectorKind::Resolving) == 1.0);

  const auto ss = make_schedule(kSlow, ProtocolMode::Modified);
  CHECK(average_fidelity(kSlow, ss, 0.05, DetectorKind::Conventional) ==
        doctest::Approx(0.812042400804).epsilon(1e-10));
  CHECK(average_fidelity(kSlow, ss, 1.0, DetectorKind::Conventional) ==
        doctest::Approx(0.998393426537).epsilon(1e-10));
}

TEST_CASE("averaged fidelity is continuous at the series switch") {
  // P/B crosses 50 as eta approaches 1 for conventional detectors; scan a
  // dense eta grid and require small steps between neighbours.
  const auto s = make_schedule(kSlow, ProtocolMode::Modified);
  double prev = average_fidelity(kSlow, s, 0.98, DetectorKind::Conventional);
  for (int i = 1; i <= 400; ++i) {
    const double eta = 0.98 + 2.5e-5 * i;
    if (eta > 1.0) break;
    const double f = average_fidelity(kSlow, s, eta, DetectorKind::Conventional);
    CHECK(f >= prev - 1e-9);       // monotone in eta here
    CHECK(std::abs(f - prev) < 1e-4);  // no jump at the branch switch
    prev = f;
  }
}

TEST_CASE("fidelity laws are monotone in eta") {
  const auto s = make_schedule(kFast, ProtocolMode::Modified);
  for (auto kind : {DetectorKind::Resolving, DetectorKind::Conventional}) {
    double prev = 0.0;
    for (double eta : {1e-4, 0.01, 0.1, 0.3, 0.6, 0.9, 1.0}) {
      const double f = average_fidelity(kFast, s, eta, kind);
      CHECK(f >= prev - 1e-12);
      prev = f;
    }
  }
}

TEST_CASE("single-click state and corrected fidelity") {
  const auto s = make_schedule(kFast, ProtocolMode::Modified);
  for (double b2 : {0.15, 0.5, 0.85}) {
    const auto q = InputQubit::from_beta2(b2, 0.7);
    for (int eps : {+1, -1}) {
      const auto bob = final_bob_state(kFast, s, q, eps);
      CHECK(corrected_fidelity(kFast, s, bob, q, eps) ==
            doctest::Approx(1.0).epsilon(1e-12));
      // without the sign correction the minus branch is off
      if (eps == -1 && b2 > 0.0)
        CHECK(corrected_fidelity(kFast, s, bob, q, +1) < 1.0 - 1e-3);
    }
    CHECK(success_fidelity(kFast, s, q) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("original mode fidelity is distorted (frozen Haar averages)") {
  const auto so = make_schedule(kSlow, ProtocolMode::Original);
  CHECK(haar_success_fidelity(kSlow, so) ==
        doctest::Approx(0.583452567718).epsilon(1e-7));
  const auto sf = make_schedule(kFast, ProtocolMode::Original);
  CHECK(haar_success_fidelity(kFast, sf) ==
        doctest::Approx(0.827296818678).epsilon(1e-7));
  // the modified schedule is undistorted
  const auto sm = make_schedule(kFast, ProtocolMode::Modified);
  CHECK(haar_success_fidelity(kFast, sm) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("survival ratios start at one and decay") {
  const auto s = make_schedule(kFast, ProtocolMode::Modified);
  const auto q = InputQubit::from_beta2(0.4);
  const auto at0 = survival_probs(kFast, s, q, 0.0);
  CHECK(at0.alice == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at0.bob == doctest::Approx(1.0).epsilon(1e-12));
  double pa = 1.0, pb = 1.0;
  for (double tj : {0.01, 0.05, 0.1, 0.3}) {
    const auto sv = survival_probs(kFast, s, q, tj);
    CHECK(sv.alice <= pa + 1e-12);
    CHECK(sv.bob <= pb + 1e-12);
    CHECK(sv.alice > 0.0);
    CHECK(sv.bob > 0.0);
    pa = sv.alice;
    pb = sv.bob;
  }
}
