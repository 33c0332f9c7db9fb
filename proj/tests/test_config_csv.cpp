#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <string>

#include "cavtel/config.hpp"
#include "cavtel/csv.hpp"
#include "doctest.h"

using namespace cavtel;

TEST_CASE("defaults survive an empty configuration") {
  const RunConfig cfg = parse_config_text("");
  CHECK(cfg.delta_mhz == 62.5);
  CHECK(cfg.kappa_mhz == 4.0);
  CHECK(cfg.eta == 1.0);
  CHECK(cfg.detector == "conventional");
  CHECK(cfg.mode == "modified");
  CHECK(cfg.backend == "analytic");
  CHECK(cfg.n_traj == 1000);
  CHECK(cfg.seed == 12345);
}

TEST_CASE("key=value parsing with comments and whitespace") {
  const std::string text =
      "# cavity run\n"
      "  kappa_mhz = 3.8   # field decay\n"
      "\n"
      "eta=0.05\n"
      "detector = resolving\n"
      "seed= 42\n"
      "n_traj =250\n";
  const RunConfig cfg = parse_config_text(text);
  CHECK(cfg.kappa_mhz == 3.8);
  CHECK(cfg.eta == 0.05);
  CHECK(cfg.detector == "resolving");
  CHECK(cfg.seed == 42);
  CHECK(cfg.n_traj == 250);
}

TEST_CASE("parse errors carry context") {
  CHECK_THROWS_WITH_AS(parse_config_text("bogus_key = 1\n"),
                       "unknown configuration key: bogus_key", ConfigError);
  CHECK_THROWS_AS(parse_config_text("kappa_mhz\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("kappa_mhz = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n_traj = 2.5\n"), ConfigError);
  try {
    parse_config_text("eta = 0.1\nnot a pair\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("overrides reuse the same key table") {
  RunConfig cfg;
  apply_override(cfg, "eta=0.5");
  apply_override(cfg, "mode = original");
  CHECK(cfg.eta == 0.5);
  CHECK(cfg.mode == "original");
  CHECK_THROWS_AS(apply_override(cfg, "eta"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "nope=1"), ConfigError);
}

TEST_CASE("file loading") {
  const std::string path = "test_config_tmp.cfg";
  {
    std::ofstream out(path);
    out << "kappa_mhz = 2.5\neta = 0.9\n";
  }
  const RunConfig cfg = load_config_file(path);
  CHECK(cfg.kappa_mhz == 2.5);
  CHECK(cfg.eta == 0.9);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config_file("does_not_exist.cfg"), ConfigError);
}

TEST_CASE("typed views validate their domain") {
  RunConfig cfg;
  CHECK(system_params(cfg).kappa == doctest::Approx(2.0 * M_PI * 4.0));
  CHECK(protocol_mode(cfg) == analytic::ProtocolMode::Modified);
  CHECK(detector_kind(cfg) == analytic::DetectorKind::Conventional);
  CHECK(dynamics_model(cfg) == qdyn::Model::Adiabatic);
  CHECK(input_ensemble(cfg).kind == estimate::EnsembleKind::Haar);

  cfg.detector = "ideal";
  CHECK_THROWS_AS(detector_kind(cfg), ConfigError);
  cfg.detector = "resolving";
  cfg.eta = 1.5;
  CHECK_THROWS_AS(detector_model(cfg), ConfigError);
  cfg.eta = 0.5;
  cfg.mode = "both";
  CHECK_THROWS_AS(protocol_mode(cfg), ConfigError);
  cfg.mode = "modified";
  cfg.model = "exact";
  CHECK_THROWS_AS(dynamics_model(cfg), ConfigError);
  cfg.model = "full";
  cfg.ensemble = "grid";
  CHECK_THROWS_AS(input_ensemble(cfg), ConfigError);
  cfg.ensemble = "fixed";
  cfg.fixed_beta2 = 0.25;
  CHECK(input_ensemble(cfg).fixed.beta2() == doctest::Approx(0.25));
  cfg.delta_mhz = -1.0;
  CHECK_THROWS_AS(system_params(cfg), ConfigError);
}

TEST_CASE("schedule view honours explicit pulse times") {
  RunConfig cfg;
  const auto s = schedule(cfg);
  const auto p = system_params(cfg);
  CHECK(s.t_a == doctest::Approx(analytic::mapping_time(p)));
  CHECK(s.t_d == doctest::Approx(4.0 / p.kappa));

  cfg.t_a_us = 0.1058;
  cfg.t_b_us = 0.0131;
  const auto s2 = schedule(cfg);
  CHECK(s2.t_a == 0.1058);
  CHECK(s2.t_b == 0.0131);
  CHECK(s2.t_d == doctest::Approx(s.t_d));

  cfg = RunConfig{};
  cfg.kappa_mhz = 20.0;  // overdamped: no closed-form schedule exists
  CHECK_THROWS_AS(schedule(cfg), ConfigError);
}

TEST_CASE("csv writer emits stable bytes") {
  auto build = [] {
    csv::Writer w({"x", "label", "n"});
    w.comment("context line");
    w.begin_row().col(0.1).col(std::string("ab")).col(7).end_row();
    w.begin_row().col(1.0 / 3.0).col(std::string("q")).col(0).end_row();
    return w.str();
  };
  const std::string a = build(), b = build();
  CHECK(a == b);
  CHECK(a.find("x,label,n\n") == 0);
  CHECK(a.find("# context line\n") != std::string::npos);
  CHECK(a.find("0.333333333333") != std::string::npos);

  CHECK(csv::format_number(0.5) == "0.5");
  CHECK(csv::format_number(1e-12) == "1e-12");
}

TEST_CASE("csv writer rejects malformed rows") {
  csv::Writer w({"a", "b"});
  CHECK_THROWS_AS(w.col(1.0), std::logic_error);
  w.begin_row();
  CHECK_THROWS_AS(w.begin_row(), std::logic_error);
  w.col(1.0);
  CHECK_THROWS_AS(w.end_row(), std::logic_error);  // one column short
  w.col(2.0);
  CHECK_NOTHROW(w.end_row());
  CHECK_THROWS_AS(w.end_row(), std::logic_error);
  CHECK_THROWS_AS(csv::Writer({}), std::invalid_argument);
}
