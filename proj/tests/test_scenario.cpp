#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "muxlink/errors.hpp"
#include "muxlink/scenario.hpp"

using namespace muxlink;
using namespace muxlink::io;

namespace {

std::string field_of(const std::string& text) {
  try {
    load_scenario(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("empty document gives the six-source defaults") {
  const auto cfg = load_scenario("{}");
  CHECK(cfg.interface.m() == 6);
  CHECK(cfg.interface.rate == 6.7e5);
  CHECK(cfg.timing.storage_us == 1.0);
  CHECK(cfg.timing.lifetime_us == 66.7);
  CHECK(cfg.timing.max_trials == 6666);
  CHECK(cfg.interface.sources[2].eta_rc == 0.705);
  CHECK(cfg.interface.sources[4].eta_t == 0.28);
  CHECK(cfg.interface.sources[3].gamma == 0.151);
  CHECK(cfg.interface.sources[0].chi == kDefaultChi);
  CHECK(cfg.bases.size() == 3);
  CHECK(cfg == ScenarioConfig{});
}

TEST_CASE("other mode counts repeat the table means") {
  const auto cfg = load_scenario(R"({"interface": {"m": 3}})");
  CHECK(cfg.interface.m() == 3);
  CHECK(cfg.interface.sources[0].eta_rc == doctest::Approx(0.6831666666666667).epsilon(1e-14));
}

TEST_CASE("validation names the field") {
  CHECK(field_of(R"({"interface": {"m": 0}})") == "interface.m");
  CHECK(field_of(R"({"interface": {"m": 3, "chi": [0.01, 0.02]}})") == "interface.chi");
  CHECK(field_of(R"({"interface": {"eta_s": 1.5}})") == "interface.eta_s");
  CHECK(field_of(R"({"mode": "sometimes"})") == "mode");
  CHECK(field_of(R"({"sweep": {"axis": "colour"}})") == "sweep.axis");
  CHECK(field_of(R"({"sweep": {"values": []}})") == "sweep.values");
  CHECK(field_of(R"({"cycles": 0})") == "cycles");
  CHECK(field_of(R"({"timing": {"lifetime_us": -1}})") == "timing.lifetime_us");
  CHECK(field_of(R"({"repeater": {"wormholes": 1}})") == "repeater.wormholes");
  CHECK(field_of(R"({"interface": {"crosstalk": {"HV": [0.6, 0]}}})") == "interface.crosstalk.HV");
  CHECK(field_of(R"({"bases": ["HV", "XY"]})") == "bases[1]");
  CHECK(field_of(R"({"seed": "one"})") == "seed");
  CHECK(field_of(R"({"extra": true})") == "extra");
  CHECK(field_of(R"({"interface": {"chi": 0.01}})") == "<accepted>");
}

TEST_CASE("syntax errors report the line") {
  try {
    load_scenario("{\n  \"seed\": 4,\n  \"cycles\": ,\n}\n");
    FAIL("accepted broken JSON");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"), ConfigError);
}

TEST_CASE("per-source lists and shorthand") {
  const auto cfg = load_scenario(R"({
    "interface": {"m": 2, "chi": [0.01, 0.02], "background": 1e-4, "theta_deg": 45,
                  "crosstalk": {"DA": [[0.01, 0.02], [0.03, 0.04]]}, "accidentals": "none"},
    "depletion": "sequential", "mode": "both", "seed": 99,
    "sweep": {"axis": "chi", "values": [0.001, 0.002]}
  })");
  CHECK(cfg.interface.sources[1].chi == 0.02);
  CHECK(cfg.interface.sources[0].background == 1e-4);
  CHECK(cfg.interface.sources[1].theta == doctest::Approx(quantum::kPi / 4).epsilon(1e-15));
  CHECK(cfg.interface.sources[1].crosstalk_for(quantum::PolarizationBasis::kDA).antistokes == 0.04);
  CHECK(cfg.interface.accidentals == detection::AccidentalModel::kNone);
  CHECK(cfg.depletion == detection::DepletionModel::kSequential);
  CHECK(cfg.mode == Mode::kBoth);
  CHECK(cfg.sweep.axis == SweepAxis::kChi);
}

TEST_CASE("emit and load round-trip exactly") {
  const char* docs[] = {
      "{}",
      R"({"interface": {"m": 2, "chi": [0.0123456789012345, 0.02], "background": [1e-4, 3e-5]},
          "timing": {"storage_us": 51}, "calibrate": true, "seed": 18446744073709551615,
          "repeater": {"eta_rc_bar": 0.683, "nesting": [1], "modes": [6]},
          "bell_law": {"deficit": 0.09, "slope": 4.1, "background": 0.002, "gamma_ref": 0.156},
          "tomography": {"shots": 0, "visibilities": [0.5]}, "output": "x.csv"})",
      R"({"interface": {"theta_rad": 0.7, "crosstalk": {"RL": [0.01, 0.01]}}, "bases": ["RL"]})",
  };
  for (const char* d : docs) {
    const auto a = load_scenario(d);
    const std::string text = emit_scenario(a);
    const auto b = load_scenario(text);
    CHECK(a == b);
    CHECK(emit_scenario(b) == text);
    CHECK(config_hash(a) == config_hash(b));
  }
  CHECK(config_hash(load_scenario("{}")) != config_hash(load_scenario(R"({"seed": 2})")));
  CHECK(config_hash(load_scenario("{}")).size() == 16);
}

TEST_CASE("files load like strings") {
  const std::string path = "scenario_test_tmp.json";
  {
    std::ofstream f(path);
    f << R"({"cycles": 500})";
  }
  CHECK(load_scenario_file(path).cycles == 500);
  std::remove(path.c_str());
}

}  // TEST_SUITE
