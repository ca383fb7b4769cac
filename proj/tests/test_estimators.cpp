#include <doctest.h>

#include <cmath>

#include "muxlink/errors.hpp"
#include "muxlink/estimators.hpp"
#include "muxlink/scenario.hpp"

using namespace muxlink;
using namespace muxlink::sim;
using quantum::DensityMatrix;

TEST_SUITE("estimators") {

TEST_CASE("visibility with bootstrap errors") {
  const auto perfect = estimate_visibility(1000, 0);
  CHECK(perfect.value == 1.0);
  CHECK(perfect.sigma < 1e-3);

  // Closed-form binomial propagation sqrt(4CN/(C+N)^3) = 0.018973665961010275.
  const auto e = estimate_visibility(900, 100);
  CHECK(e.value == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(e.sigma == doctest::Approx(0.018973665961010275).epsilon(0.2));

  const auto big = estimate_visibility(90000, 10000);
  CHECK(big.sigma == doctest::Approx(0.0018973665961010276).epsilon(0.2));

  CHECK(estimate_visibility(900, 100).sigma == estimate_visibility(900, 100).sigma);
  CHECK_THROWS_AS(estimate_visibility(0, 0), UndefinedEstimate);
}

TEST_CASE("composite over equal sources equals the pooled estimate") {
  CountsTable c;
  c.basis = quantum::PolarizationBasis::kHV;
  SourceTally t;
  t.xx = 400;
  t.yy = 300;
  t.xy = 20;
  t.yx = 15;
  t.stokes_x = 5000;
  t.stokes_y = 4000;
  c.sources.assign(6, t);
  const auto pooled = estimate_visibility(c);
  CHECK(pooled.value == doctest::Approx(665.0 / 735.0).epsilon(1e-15));
  CHECK(pooled.value == estimate_visibility(6 * 700.0, 6 * 35.0).value);
}

TEST_CASE("CHSH from counts") {
  const auto phi = DensityMatrix::pure(quantum::phi_plus());
  CHECK(estimate_chsh(expected_chsh_counts(phi, 1e9)).value == doctest::Approx(quantum::kTsirelson).epsilon(1e-12));
  const auto w = DensityMatrix::werner(quantum::phi_plus(), 0.88);
  CHECK(estimate_chsh(expected_chsh_counts(w, 1e9)).value == doctest::Approx(2.4890158697766465).epsilon(1e-12));

  Rng rng(8);
  const auto sampled = estimate_chsh(sample_chsh_counts(w, 20000, rng));
  CHECK(sampled.sigma > 0.0);
  CHECK(std::abs(sampled.value - 2.4890158697766465) < 5 * sampled.sigma);

  ChshCounts empty{};
  CHECK_THROWS_AS(estimate_chsh(empty), UndefinedEstimate);

  // Per-source counts at the same S but different totals: the composite is that S.
  std::vector<ChshCounts> per_source = {expected_chsh_counts(w, 1000), expected_chsh_counts(w, 7000),
                                        expected_chsh_counts(w, 300)};
  CHECK(estimate_chsh(per_source).value == doctest::Approx(2.4890158697766465).epsilon(1e-12));

  SettingCounts s;
  s.n = {{{10, 0}, {0, 10}}};
  CHECK(correlation_from_counts(s) == 1.0);
}

TEST_CASE("average Bell parameter") {
  CHECK(estimate_average_bell({{2.4, 0.03}, {2.2, 0.04}}).value == doctest::Approx(2.3).epsilon(1e-15));
  CHECK(estimate_average_bell({{2.4, 0.03}, {2.2, 0.04}}).sigma == doctest::Approx(0.025).epsilon(1e-14));
  CHECK(estimate_average_bell({{2.5, 0.1}, {2.5, 0.1}, {2.5, 0.1}}).value == doctest::Approx(2.5).epsilon(1e-15));

  // Symmetric sources: composite and plain average agree within the combined 2 sigma.
  const auto w = DensityMatrix::werner(quantum::phi_plus(), 0.85);
  Rng rng(19);
  std::vector<ChshCounts> per_source;
  std::vector<EstimateWithError> singles;
  for (int i = 0; i < 6; ++i) {
    per_source.push_back(sample_chsh_counts(w, 5000, rng));
    singles.push_back(estimate_chsh(per_source.back()));
  }
  const auto composite = estimate_chsh(per_source);
  const auto mean = estimate_average_bell(singles);
  CHECK(std::abs(composite.value - mean.value) <= 2 * std::hypot(composite.sigma, mean.sigma));
}

TEST_CASE("measured Pauli expectations") {
  const auto w = DensityMatrix::werner(quantum::phi_plus(), 0.9);
  Rng rng(2);
  const auto exact = measure_pauli_expectations(w, 0, rng);
  const auto ref = quantum::pauli_expectations(w);
  for (std::size_t k = 0; k < exact.size(); ++k) CHECK(exact[k] == doctest::Approx(ref[k]).epsilon(1e-14));
  const auto noisy = measure_pauli_expectations(w, 100000, rng);
  for (std::size_t k = 0; k < noisy.size(); ++k) CHECK(std::abs(noisy[k] - ref[k]) < 0.02);
}

TEST_CASE("estimates from a simulated run") {
  auto ip = io::default_interface(6);
  const auto c = run_simulation(4, ip, {}, quantum::PolarizationBasis::kHV, 200000);
  const auto e = estimate_visibility(c);
  const double v = detection::composite_visibility(apply_decay(ip, TimingConfig{}), quantum::PolarizationBasis::kHV,
                                                   detection::DepletionModel::kSequential);
  CHECK(std::abs(e.value - v) < 5 * e.sigma);
}

}  // TEST_SUITE
