#pragma once

// Scenario files: JSON with every key optional and defaults from the six-source experiment.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "muxlink/calibration.hpp"
#include "muxlink/detection.hpp"
#include "muxlink/trial_sim.hpp"

namespace muxlink::io {

using detection::DepletionModel;
using detection::InterfaceParams;
using quantum::PolarizationBasis;

/// Per-source values measured on the six-source interface.
struct SourceTables {
  static constexpr std::array<double, 6> eta_rc = {0.689, 0.672, 0.705, 0.689, 0.680, 0.664};
  static constexpr std::array<double, 6> eta_s = {0.29, 0.29, 0.29, 0.30, 0.30, 0.29};
  static constexpr std::array<double, 6> eta_t = {0.30, 0.29, 0.29, 0.30, 0.28, 0.29};
  static constexpr std::array<double, 6> gamma = {0.156, 0.156, 0.160, 0.151, 0.158, 0.158};
};

inline constexpr double kDefaultChi = 0.00724;

/// m = 6 gives the per-source tables; any other m repeats the table means.
InterfaceParams default_interface(std::size_t m = 6);

enum class Mode { kAnalytic, kMonteCarlo, kBoth };
std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

enum class SweepAxis { kChi, kStokes, kStorage };
std::string to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& text);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kStokes;
  std::vector<double> values = {0.0126, 0.0297, 0.0421, 0.0594, 0.0738};
  /// For the chi-free axes: solve an equal chi giving this multiplexed p_S instead of using interface.chi.
  std::optional<double> p_s;
  bool operator==(const SweepSpec&) const = default;
};

struct RepeaterSpec {
  double elementary_km = 50.0;  // L0
  std::vector<std::size_t> nesting = {0, 1, 2};
  std::vector<std::size_t> modes = {1, 6};  // m values to tabulate
  double attenuation_km = 22.0;
  double eta_dc = 1.0;
  double fiber_speed_km_s = 2.0e5;
  double zeta = 1.0;
  /// Unset: derived from the interface (mean eta_rc, 1/2 gamma^2 eta_S^2, per-source p_S).
  std::optional<double> eta_rc_bar;
  std::optional<double> swap_success;
  std::optional<double> p_s;
  bool operator==(const RepeaterSpec&) const = default;
};

struct CalibrationSpec {
  std::vector<calibration::BellTableRow> table = calibration::kTableI;
  calibration::BasisTargets basis_targets{};
  bool operator==(const CalibrationSpec& o) const;
};

struct TomographySpec {
  double theta_deg = 45.0;
  std::vector<double> visibilities = {1.0, 0.94, 0.88};
  std::uint64_t shots = 10000;  // per Pauli product basis; 0 = exact expectations
  bool operator==(const TomographySpec&) const = default;
};

struct ScenarioConfig {
  InterfaceParams interface = default_interface();
  sim::TimingConfig timing{};
  std::vector<PolarizationBasis> bases = {PolarizationBasis::kHV, PolarizationBasis::kDA, PolarizationBasis::kRL};
  DepletionModel depletion = DepletionModel::kAverage;
  SweepSpec sweep{};
  Mode mode = Mode::kAnalytic;
  std::uint64_t cycles = 100000;
  std::uint64_t seed = 1;
  std::string output;  // empty: standard output
  /// Fit the linear law and per-basis noise to the calibration data before sweeping.
  bool calibrate = false;
  std::optional<detection::LinearLaw> bell_law;
  RepeaterSpec repeater{};
  CalibrationSpec calibration{};
  TomographySpec tomography{};

  bool operator==(const ScenarioConfig& o) const;
};

/// Parses and validates. Throws ConfigError naming the offending key (or line for syntax errors).
ScenarioConfig load_scenario(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

/// Canonical JSON with every field spelled out; load_scenario(emit_scenario(c)) == c.
std::string emit_scenario(const ScenarioConfig& cfg);

/// FNV-1a 64 of the canonical form, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

/// Re-checks cross-field constraints; load_scenario calls it.
void validate(const ScenarioConfig& cfg);

}  // namespace muxlink::io
