#include <doctest.h>

#include <cmath>
#include <sstream>

#include "muxlink/errors.hpp"
#include "muxlink/sweep.hpp"

using namespace muxlink;
using namespace muxlink::io;

TEST_SUITE("sweep") {

TEST_CASE("noise-free single point has unit H-V visibility") {
  const auto cfg = load_scenario(R"({"interface": {"m": 1, "accidentals": "none"},
                                     "sweep": {"axis": "chi", "values": [0.01]}, "bases": ["HV"]})");
  const auto t = run_sweep(cfg);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.number(0, "V_HV") == 1.0);
  CHECK(t.at(0, "mode") == "analytic");
  CHECK(t.at(0, "V_DA").empty());
}

TEST_CASE("CSV layout") {
  const auto cfg = load_scenario(R"({"sweep": {"values": [0.0126]}})");
  const auto t = run_sweep(cfg);
  std::ostringstream out;
  write_csv(out, t, "sweep", cfg);
  const std::string s = out.str();
  CHECK(s.rfind("# muxlink 0.1.0\n", 0) == 0);
  CHECK(s.find("# config_hash: " + config_hash(cfg) + "\n") != std::string::npos);
  CHECK(s.find("# seed: 1\n") != std::string::npos);
  CHECK(s.find("\naxis,value,mode,chi_bar,") != std::string::npos);
  std::ostringstream again;
  write_csv(again, run_sweep(cfg), "sweep", cfg);
  CHECK(again.str() == s);

  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(std::nan("")).empty());
  CHECK_THROWS_AS(t.at(0, "no_such_column"), std::out_of_range);
}

TEST_CASE("analytic and Monte Carlo rows agree") {
  const auto cfg = load_scenario(R"({"calibrate": true, "mode": "both", "cycles": 300000, "seed": 7,
                                     "sweep": {"values": [0.0126, 0.0594]}})");
  const auto t = run_sweep(cfg);
  REQUIRE(t.rows.size() == 4);
  for (std::size_t i = 0; i < 4; i += 2) {
    CHECK(t.at(i, "mode") == "analytic");
    CHECK(t.at(i + 1, "mode") == "mc");
    for (const char* b : {"HV", "DA", "RL"}) {
      const std::string v = std::string("V_") + b;
      const double sigma = t.number(i + 1, "sigma_" + v);
      CHECK(sigma > 0.0);
      CHECK(std::abs(t.number(i, v) - t.number(i + 1, v)) < 5 * sigma);
    }
    CHECK(std::abs(t.number(i, "S") - t.number(i + 1, "S")) < 5 * t.number(i + 1, "sigma_S"));
  }
  // Calibrated point reproduces the three basis targets.
  CHECK(t.number(0, "V_HV") == doctest::Approx(0.941).epsilon(1e-8));
  CHECK(t.number(0, "V_DA") == doctest::Approx(0.844).epsilon(1e-8));
  CHECK(t.number(0, "V_RL") == doctest::Approx(0.816).epsilon(1e-8));
}

TEST_CASE("storage-time sweep follows the calibrated law") {
  const auto cfg = load_scenario(R"({"calibrate": true,
                                     "sweep": {"axis": "storage_us", "values": [1, 25, 51], "p_s": 0.0297}})");
  const auto t = run_sweep(cfg);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.number(0, "S_law") == doctest::Approx(2.3757478857758136).epsilon(1e-10));
  CHECK(t.number(1, "S_law") == doctest::Approx(2.3650117144181753).epsilon(1e-10));
  CHECK(t.number(2, "S_law") == doctest::Approx(2.3191379901249713).epsilon(1e-10));
  CHECK(t.number(2, "gamma_bar") == doctest::Approx(0.08721844173610295).epsilon(1e-12));
  CHECK(t.number(2, "p_s") == doctest::Approx(0.0297).epsilon(1e-10));
}

TEST_CASE("engine failures carry the sweep point") {
  const auto cfg = load_scenario(R"({"interface": {"chi": 0.0}, "sweep": {"axis": "chi", "values": [0.0]}})");
  try {
    run_sweep(cfg);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("chi=0") != std::string::npos);
  }
}

TEST_CASE("repeater table") {
  auto cfg = load_scenario(R"({"repeater": {"eta_rc_bar": 0.683, "nesting": [0, 1], "modes": [1, 6]}})");
  const auto t = run_repeater(cfg);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.number(0, "speedup") == 1.0);
  CHECK(t.number(1, "speedup") == 1.0);
  CHECK(t.number(3, "speedup") == doctest::Approx(2.7989340000000005).epsilon(1e-10));
  CHECK(t.number(2, "speedup") == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(t.number(3, "L_km") == 100.0);
  CHECK(t.at(3, "reachable") == "1");

  auto slow = cfg;
  slow.repeater.eta_dc = 0.136;
  const auto ts = run_repeater(slow);
  for (const char* col : {"T_single_s", "T_multiplexed_s"})
    CHECK(ts.number(3, col) / t.number(3, col) == doctest::Approx(1 / 0.018496).epsilon(1e-6));

  auto dead = cfg;
  dead.repeater.swap_success = 0.0;
  const auto td = run_repeater(dead);
  CHECK(td.rows.size() == 4);
  CHECK(td.at(3, "T_single_s") == "inf");
  CHECK(td.at(3, "reachable") == "0");
}

TEST_CASE("calibration report") {
  const auto cfg = load_scenario("{}");
  const auto rep = run_calibration(cfg);
  CHECK(rep.law.background == doctest::Approx(0.0019721743506689727).epsilon(1e-9));
  CHECK(rep.law.gamma_ref == doctest::Approx(0.15646482663930536).epsilon(1e-12));
  const auto t = calibration_table(cfg, rep);
  CHECK(t.header == std::vector<std::string>{"section", "name", "value"});
  bool found = false;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.at(i, "section") == "basis" && t.at(i, "name") == "V_fit_RL") {
      CHECK(t.number(i, "value") == doctest::Approx(0.816).epsilon(1e-9));
      found = true;
    }
  CHECK(found);
  const auto applied = apply_calibration(cfg, rep);
  CHECK(applied.bell_law.has_value());
  CHECK(applied.interface.sources[3].background == rep.basis.background);
}

TEST_CASE("tomography table") {
  const auto exact = load_scenario(R"({"tomography": {"shots": 0, "visibilities": [1.0, 0.9]}})");
  const auto t = run_tomography(exact);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.number(0, "fidelity_to_input") >= 0.999);
  CHECK(t.number(1, "fidelity_to_pure") == doctest::Approx(0.925).epsilon(1e-9));
  CHECK(t.number(1, "S_reconstructed") == doctest::Approx(quantum::kTsirelson * 0.9).epsilon(1e-9));
  const auto sampled = run_tomography(load_scenario("{}"));
  for (std::size_t i = 0; i < sampled.rows.size(); ++i) CHECK(sampled.number(i, "fidelity_to_input") > 0.98);
}

}  // TEST_SUITE
