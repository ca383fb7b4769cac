#pragma once

// Sweep orchestration and CSV output for the command-line tool.

#include <ostream>
#include <string>
#include <vector>

#include "muxlink/calibration.hpp"
#include "muxlink/scenario.hpp"

namespace muxlink::io {

inline constexpr const char* kVersion = "0.1.0";

/// Storage time the calibration data were taken at.
inline constexpr double kCalibrationStorageUs = 1.0;

/// A CSV table: fixed header, rows of already formatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Cell by column name; throws std::out_of_range for an unknown column.
  const std::string& at(std::size_t row, const std::string& column) const;
  double number(std::size_t row, const std::string& column) const;
};

/// Full-precision decimal ("%.17g"); NaN prints as an empty cell.
std::string format_number(double x);

/// Writes `# key: value` metadata lines followed by the table.
void write_csv(std::ostream& out, const Table& table, const std::string& command, const ScenarioConfig& cfg);

/// Result of fitting both the linear law and the per-basis noise.
struct CalibrationReport {
  calibration::CalibrationResult bell;
  calibration::CalibrationResult fidelity;
  calibration::BasisCalibration basis;
  detection::LinearLaw law;  // from the Bell fit, background from the basis fit
};

CalibrationReport run_calibration(const ScenarioConfig& cfg);

/// Copy of cfg with calibrated noise on the interface and the fitted law installed.
ScenarioConfig apply_calibration(ScenarioConfig cfg, const CalibrationReport& report);

/// Rows: one per sweep point per mode (analytic first), in sweep order.
Table run_sweep(const ScenarioConfig& cfg);

/// Rows: one per (m, n) pair.
Table run_repeater(const ScenarioConfig& cfg);

/// Long format: section, name, value.
Table calibration_table(const ScenarioConfig& cfg, const CalibrationReport& report);

/// Rows: one per visibility in the tomography spec.
Table run_tomography(const ScenarioConfig& cfg);

}  // namespace muxlink::io
