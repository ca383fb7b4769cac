#pragma once

// Fitting the linear visibility law and the per-basis noise terms to printed data points.

#include <array>
#include <string>
#include <vector>

#include "muxlink/detection.hpp"

namespace muxlink::calibration {

using detection::DepletionModel;
using detection::InterfaceParams;
using quantum::PolarizationBasis;

/// One row of the multiplexed Bell/fidelity table at delta t = 1 us.
struct BellTableRow {
  double p_s = 0.0;
  double bell = 0.0;
  double fidelity = 0.0;
};

inline const std::vector<BellTableRow> kTableI = {
    {0.0126, 2.49, 0.87}, {0.0297, 2.38, 0.85}, {0.0421, 2.29, 0.82}, {0.0594, 2.17, 0.78}, {0.0738, 2.09, 0.75}};

/// How a table column is turned into a Werner visibility.
enum class Mapping {
  kBell,      // V = S / (2 sqrt 2)
  kFidelity,  // V = (4F - 1) / 3
};

std::string to_string(Mapping mapping);
Mapping parse_mapping(const std::string& text);

double visibility_from_bell(double s);
double visibility_from_fidelity(double f);

struct CalibrationResult {
  std::string method;
  double intercept = 0.0;     // V at p_S -> 0
  double slope_per_ps = 0.0;  // dV / dp_S
  double chi_scale = 1.0;     // m * mean eta_S, so chi_bar = p_S / chi_scale
  double deficit = 0.0;       // Z_bar = 1 - intercept
  double slope = 0.0;         // K_bar, per unit chi_bar
  std::vector<double> residuals;  // observed - fitted V
  double residual_norm = 0.0;

  double visibility(double p_s) const { return intercept + slope_per_ps * p_s; }
  double bell(double p_s) const { return quantum::kTsirelson * visibility(p_s); }
  double fidelity(double p_s) const { return (3.0 * visibility(p_s) + 1.0) / 4.0; }
};

/// Least squares V = intercept + slope * p_S over (p_S, V) points.
/// Throws DomainError on fewer than two points or a degenerate abscissa.
CalibrationResult calibrate_linear(const std::vector<std::array<double, 2>>& points, double chi_scale,
                                   const std::string& method = "least-squares");

/// Maps one column of the table to visibilities and fits it; chi_scale from the interface.
CalibrationResult calibrate_table(const std::vector<BellTableRow>& rows, Mapping mapping, const InterfaceParams& ip);

/// Linear law carrying the background share so the deficit can follow gamma.
detection::LinearLaw to_law(const CalibrationResult& fit, double background, double gamma_ref);

/// Composite visibilities the per-basis noise is fitted to.
struct BasisTargets {
  double p_s = 0.0126;
  std::array<double, 3> visibility = {0.941, 0.844, 0.816};  // HV, DA, RL
};

struct BasisCalibration {
  double chi = 0.0;         // equal chi giving p_S^(m) = target p_s
  double background = 0.0;  // G, fixed by the H-V visibility with zero H-V crosstalk
  std::array<detection::Crosstalk, 3> crosstalk{};  // a = b = half the fitted sum, per basis
  std::array<double, 3> achieved{};
  std::array<double, 3> residuals{};
};

/// Solves G and chi jointly from the H-V target, then the D-A and R-L crosstalk sums.
BasisCalibration calibrate_basis_noise(const InterfaceParams& ip, const BasisTargets& targets,
                                       DepletionModel depletion = DepletionModel::kAverage);

/// Copies G and crosstalk onto every source (chi untouched).
InterfaceParams apply_noise(InterfaceParams ip, const BasisCalibration& cal);

}  // namespace muxlink::calibration
