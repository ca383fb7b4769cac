#include <doctest.h>

#include <cmath>

#include "muxlink/calibration.hpp"
#include "muxlink/errors.hpp"
#include "muxlink/scenario.hpp"
#include "muxlink/trial_sim.hpp"

using namespace muxlink;
using namespace muxlink::calibration;
using quantum::PolarizationBasis;

namespace {

InterfaceParams calibration_interface() {
  return sim::apply_decay(io::default_interface(6), sim::TimingConfig{});
}

}  // namespace

TEST_SUITE("calibration") {

TEST_CASE("linear fit basics") {
  const auto exact = calibrate_linear({{0.01, 0.9}, {0.03, 0.85}}, 1.74);
  CHECK(exact.residual_norm < 1e-15);
  CHECK(exact.slope_per_ps == doctest::Approx(-2.5).epsilon(1e-13));
  CHECK(exact.intercept == doctest::Approx(0.925).epsilon(1e-14));
  CHECK(exact.slope == doctest::Approx(2.5 * 1.74).epsilon(1e-13));
  CHECK_THROWS_AS(calibrate_linear({{0.01, 0.9}}, 1.0), DomainError);
  CHECK_THROWS_AS(calibrate_linear({{0.01, 0.9}, {0.01, 0.8}}, 1.0), DomainError);
  CHECK_THROWS_AS(parse_mapping("phase"), DomainError);
  CHECK(parse_mapping("F") == Mapping::kFidelity);
}

TEST_CASE("table fits match the oracle") {
  const auto ip = calibration_interface();
  const auto bell = calibrate_table(kTableI, Mapping::kBell, ip);
  CHECK(bell.intercept == doctest::Approx(0.9096644257133993).epsilon(1e-13));
  CHECK(bell.slope_per_ps == doctest::Approx(-2.347161801432957).epsilon(1e-13));
  CHECK(bell.slope == doctest::Approx(4.131004770522004).epsilon(1e-13));
  const auto fid = calibrate_table(kTableI, Mapping::kFidelity, ip);
  CHECK(fid.intercept == doctest::Approx(0.870035459952685).epsilon(1e-13));
  CHECK(fid.slope == doctest::Approx(4.773492865733607).epsilon(1e-13));

  for (const auto& row : kTableI) {
    CHECK(std::abs(bell.bell(row.p_s) - row.bell) <= 0.03);
    CHECK(std::abs(fid.fidelity(row.p_s) - row.fidelity) <= 0.02);
  }
}

TEST_CASE("basis noise calibration") {
  const auto cal = calibrate_basis_noise(calibration_interface(), BasisTargets{});
  CHECK(cal.background == doctest::Approx(0.0019721743506689727).epsilon(1e-9));
  CHECK(cal.chi == doctest::Approx(0.0032527935166724096).epsilon(1e-9));
  CHECK(cal.crosstalk[1].sum() == doctest::Approx(0.029973824879761767).epsilon(1e-9));
  CHECK(cal.crosstalk[2].sum() == doctest::Approx(0.04519217737097892).epsilon(1e-9));
  CHECK(cal.crosstalk[0].sum() == 0.0);
  for (double r : cal.residuals) CHECK(std::abs(r) < 1e-9);

  auto fitted = apply_noise(calibration_interface(), cal);
  fitted = detection::with_equal_chi(fitted, cal.chi);
  CHECK(detection::composite_visibility(fitted, PolarizationBasis::kDA) == doctest::Approx(0.844).epsilon(1e-9));

  BasisTargets impossible;
  impossible.visibility = {0.999999, 0.844, 0.816};
  CHECK_THROWS_AS(calibrate_basis_noise(calibration_interface(), impossible), DomainError);
  BasisTargets bad;
  bad.visibility = {1.2, 0.8, 0.8};
  CHECK_THROWS_AS(calibrate_basis_noise(calibration_interface(), bad), DomainError);
}

TEST_CASE("law carries the background share") {
  const auto fit = calibrate_table(kTableI, Mapping::kBell, calibration_interface());
  const auto law = to_law(fit, 0.002, 0.156);
  CHECK(law.deficit == fit.deficit);
  CHECK(law.slope == fit.slope);
  CHECK(law.visibility(0.0126 / fit.chi_scale) == doctest::Approx(fit.visibility(0.0126)).epsilon(1e-14));
}

}  // TEST_SUITE
