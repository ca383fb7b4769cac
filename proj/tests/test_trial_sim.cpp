#include <doctest.h>

#include <cmath>

#include "muxlink/errors.hpp"
#include "muxlink/scenario.hpp"
#include "muxlink/trial_sim.hpp"

using namespace muxlink;
using namespace muxlink::sim;
using quantum::PolarizationBasis;

namespace {

InterfaceParams table_interface(double chi, double g = 0.0) {
  auto ip = io::default_interface(6);
  for (auto& s : ip.sources) {
    s.chi = chi;
    s.background = g;
  }
  return ip;
}

// Counts against an expected per-trial probability, in Poisson standard deviations.
double pull(std::uint64_t count, double p, std::uint64_t trials) {
  const double mean = p * static_cast<double>(trials);
  return (static_cast<double>(count) - mean) / std::sqrt(mean);
}

}  // namespace

TEST_SUITE("trial_sim") {

TEST_CASE("retrieval decay") {
  SourceParams p;
  p.gamma = 0.157;
  TimingConfig t;
  t.storage_us = 0.0;
  CHECK(apply_decay(p, t).gamma == 0.157);
  t.storage_us = t.lifetime_us;
  CHECK(apply_decay(p, t).gamma == doctest::Approx(0.157 / std::exp(1.0)).epsilon(1e-15));
  t.storage_us = 51.0;
  const auto d = apply_decay(p, t);
  CHECK(d.gamma == doctest::Approx(0.0874970949045889).epsilon(1e-14));
  CHECK(d.chi == p.chi);
  CHECK(d.eta_s == p.eta_s);
}

TEST_CASE("dark interface never fires") {
  const CycleModel model(table_interface(0.0), TimingConfig{}, PolarizationBasis::kHV);
  Rng rng(1);
  for (int k = 0; k < 10; ++k) {
    for (const auto& o : {model.sample(rng), model.sample_naive(rng)}) {
      CHECK_FALSE(o.fired_source.has_value());
      CHECK_FALSE(o.antistokes_detector.has_value());
      CHECK(o.trials_consumed == kDefaultMaxTrials);
    }
  }
}

TEST_CASE("over-unity probabilities are configuration errors") {
  InterfaceParams ip;
  SourceParams s;
  s.chi = 0.1;
  s.theta = 0.01;
  s.gamma = 1.0;
  s.eta_t = 1.0;
  s.crosstalk_for(PolarizationBasis::kHV) = {0.01, 0.45};
  ip.sources = {s};
  CHECK_THROWS_AS(CycleModel(ip, TimingConfig{}, PolarizationBasis::kHV), ConfigError);
  s = SourceParams{};
  s.chi = 1.0;
  s.eta_s = 1.0;
  s.background = 0.5;
  ip.sources = {s};
  CHECK_THROWS_AS(CycleModel(ip, TimingConfig{}, PolarizationBasis::kHV), ConfigError);
}

TEST_CASE("runs are deterministic and partition stable") {
  const auto ip = table_interface(0.01, 2e-4);
  const std::uint64_t cycles = 3 * kBlockCycles + 123;
  const auto a = run_simulation(42, ip, {}, PolarizationBasis::kDA, cycles);
  const auto b = run_simulation(42, ip, {}, PolarizationBasis::kDA, cycles);
  const auto serial = run_simulation_serial(42, ip, {}, PolarizationBasis::kDA, cycles);
  CHECK(a == b);
  CHECK(a == serial);
  CHECK(a.cycles == cycles);
  CHECK_FALSE(a == run_simulation(43, ip, {}, PolarizationBasis::kDA, cycles));

  // Blocks are the unit of reproducibility: merging them by hand gives the same table.
  const CycleModel model(ip, {}, PolarizationBasis::kDA);
  CountsTable manual = run_block(model, 42, 0, kBlockCycles, Sampler::kFast);
  manual.merge(run_block(model, 42, 1, kBlockCycles, Sampler::kFast));
  manual.merge(run_block(model, 42, 2, kBlockCycles, Sampler::kFast));
  manual.merge(run_block(model, 42, 3, 123, Sampler::kFast));
  CHECK(manual == a);

  CountsTable other = run_block(model, 1, 0, 10, Sampler::kFast);
  other.basis = PolarizationBasis::kHV;
  CHECK_THROWS_AS(manual.merge(other), DomainError);
  CHECK_THROWS_AS(run_simulation(1, ip, {}, PolarizationBasis::kHV, 0), DomainError);
}

TEST_CASE("noise-free single source has no crossed pairs") {
  InterfaceParams ip;
  SourceParams s;
  s.chi = 0.02;
  ip.sources = {s};
  ip.accidentals = detection::AccidentalModel::kNone;
  const auto c = run_simulation(5, ip, {}, PolarizationBasis::kHV, 200000);
  CHECK(c.sources[0].xy == 0);
  CHECK(c.sources[0].yx == 0);
  CHECK(c.sources[0].xx > 0);
  CHECK(c.sources[0].coincidences() <= c.sources[0].stokes());
}

TEST_CASE("tallies match the frozen oracle") {
  // Per-trial first-click probabilities with sequential depletion, from interface_oracle.py.
  struct Expect {
    double chi, g;
    double stokes_x[2], xx[2], yx[2];
    double fired[6];
  };
  const Expect cases[] = {
      {0.00724, 0.0, {0.0013584835334288726, 0.001344086879493832}, {4.399988132054613e-05, 4.1075471507508624e-05},
       {1.1192066961074336e-07, 1.044819698991023e-07},
       {0.16564968518580742, 0.16530188710679128, 0.16495481926462188, 0.1702846346132006, 0.1699147763868207,
        0.16389419744275824}},
      {0.01, 0.0005, {0.0020213584715868408, 0.001988883816926628}, {6.112049060759247e-05, 5.6740375506892435e-05},
       {3.645414283634045e-07, 3.37012367447387e-07},
       {0.16610683669391726, 0.16557695588486365, 0.1650487653955909, 0.17019544120756447, 0.1696337962515795,
        0.1634382045664843}},
  };
  for (const auto& e : cases) {
    const auto c = run_simulation(2024, table_interface(e.chi, e.g), {}, PolarizationBasis::kHV, 1000000);
    const std::size_t idx[2] = {0, 5};
    for (int k = 0; k < 2; ++k) {
      const auto& t = c.sources[idx[k]];
      CHECK(std::abs(pull(t.stokes_x, e.stokes_x[k], c.trials)) < 5.0);
      CHECK(std::abs(pull(t.xx, e.xx[k], c.trials)) < 5.0);
      CHECK(std::abs(pull(t.yx, e.yx[k], c.trials)) < 5.0);
    }
    const double fired = static_cast<double>(c.stokes_total());
    for (std::size_t i = 0; i < 6; ++i) {
      const double p = e.fired[i];
      const double sigma = std::sqrt(p * (1 - p) / fired);
      CHECK(std::abs(static_cast<double>(c.sources[i].stokes()) / fired - p) < 5 * sigma);
    }
  }
}

TEST_CASE("geometric-jump and per-trial samplers agree") {
  const auto ip = table_interface(0.008, 3e-4);
  TimingConfig t;
  t.max_trials = 200;  // exercise the exhausted-window branch too
  const std::uint64_t cycles = 60000;
  const auto fast = run_simulation(9, ip, t, PolarizationBasis::kRL, cycles, Sampler::kFast);
  const auto naive = run_simulation(9, ip, t, PolarizationBasis::kRL, cycles, Sampler::kNaive);
  const CycleModel model(ip, t, PolarizationBasis::kRL);
  const double stop = 1.0 - std::pow(1.0 - model.trial_fire_probability(), 200.0);
  for (const auto* c : {&fast, &naive}) {
    // Fraction of cycles that fire, a binomial with known mean.
    const double f = static_cast<double>(c->stokes_total()) / static_cast<double>(cycles);
    CHECK(std::abs(f - stop) < 5 * std::sqrt(stop * (1 - stop) / cycles));
  }
  for (std::size_t i = 0; i < 6; ++i) {
    const double a = static_cast<double>(fast.sources[i].stokes());
    const double b = static_cast<double>(naive.sources[i].stokes());
    CHECK(std::abs(a - b) < 5 * std::sqrt(a + b));
    const double ca = static_cast<double>(fast.sources[i].coincidences());
    const double cb = static_cast<double>(naive.sources[i].coincidences());
    CHECK(std::abs(ca - cb) < 5 * std::sqrt(ca + cb + 1));
  }
}

TEST_CASE("coincidences follow the Gaussian decay law") {
  auto ip = table_interface(0.01);
  ip.accidentals = detection::AccidentalModel::kNone;
  TimingConfig t0, t1;
  t0.storage_us = 0.0;
  t1.storage_us = 40.0;
  const auto c0 = run_simulation(77, ip, t0, PolarizationBasis::kHV, 1000000);
  const auto c1 = run_simulation(78, ip, t1, PolarizationBasis::kHV, 1000000);
  auto per_trial = [](const CountsTable& c) {
    std::uint64_t n = 0;
    for (const auto& s : c.sources) n += s.coincidences();
    return std::pair{static_cast<double>(n), static_cast<double>(n) / static_cast<double>(c.trials)};
  };
  const auto [n0, r0] = per_trial(c0);
  const auto [n1, r1] = per_trial(c1);
  const double ratio = r1 / r0;
  const double sigma = ratio * std::sqrt(1 / n0 + 1 / n1);
  CHECK(std::abs(ratio - std::exp(-40.0 * 40.0 / (66.7 * 66.7))) < 5 * sigma);
}

TEST_CASE("one-source list behaves as a single source") {
  InterfaceParams one;
  SourceParams s;
  s.chi = 0.015;
  s.background = 1e-4;
  one.sources = {s};
  const auto c = run_simulation(3, one, {}, PolarizationBasis::kDA, 300000);
  const auto row = detection::prob_table(apply_decay(s, TimingConfig{}), PolarizationBasis::kDA);
  CHECK(std::abs(pull(c.sources[0].stokes(), row.stokes(), c.trials)) < 5.0);
  CHECK(std::abs(pull(c.matched_total(), row.matched(), c.trials)) < 5.0);
  CHECK(std::abs(pull(c.mismatched_total(), row.mismatched(), c.trials)) < 5.0);
}

}  // TEST_SUITE
