#pragma once

// Two-qubit polarization states and the measurements made on them.
//
// Qubit order is (Stokes photon, anti-Stokes photon / memory). Computational
// basis index = 2*s + t with H = 0 and V = 1, so |HV> means Stokes H, anti-Stokes V.

#include <array>
#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace muxlink::quantum {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTsirelson = 2.8284271247461900976;  // 2*sqrt(2)

/// Clebsch-Gordan angle of the 87Rb write transition, 0.81 * pi/4.
inline constexpr double kRubidiumTheta = 0.81 * kPi / 4.0;

enum class PolarizationBasis { kHV, kDA, kRL };

inline constexpr std::array<PolarizationBasis, 3> kAllBases = {
    PolarizationBasis::kHV, PolarizationBasis::kDA, PolarizationBasis::kRL};

std::string_view to_string(PolarizationBasis basis);
/// Accepts "HV", "DA", "RL" (also "H-V" style). Throws DomainError otherwise.
PolarizationBasis parse_basis(std::string_view text);

/// Detector 1 sits at the transmit port of a PBS, detector 2 at the reflect port.
enum class Port { kTransmit = 1, kReflect = 2 };

struct DetectorPair {
  Port stokes;
  Port antistokes;
};

inline constexpr std::array<DetectorPair, 4> kAllOutcomes = {{
    {Port::kTransmit, Port::kTransmit},
    {Port::kTransmit, Port::kReflect},
    {Port::kReflect, Port::kTransmit},
    {Port::kReflect, Port::kReflect},
}};

/// Linear analyzer angles in degrees, taken modulo 180.
struct AnalyzerSetting {
  double stokes_deg = 0.0;
  double antistokes_deg = 0.0;
};

class PureTwoQubitState {
 public:
  /// Throws DomainError unless the amplitudes have unit norm within 1e-12.
  explicit PureTwoQubitState(const Vector4c& amplitudes);

  const Vector4c& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](int index) const { return amplitudes_[index]; }

 private:
  Vector4c amplitudes_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity (1e-12), unit trace (1e-12) and PSD (eigenvalues >= -1e-9).
  explicit DensityMatrix(const Matrix4c& entries);

  static DensityMatrix pure(const PureTwoQubitState& state);
  static DensityMatrix maximally_mixed();
  /// visibility * |psi><psi| + (1 - visibility) * I/4, visibility in [0, 1].
  static DensityMatrix werner(const PureTwoQubitState& state, double visibility);

  const Matrix4c& matrix() const noexcept { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

 private:
  Matrix4c entries_;
};

/// cos(theta)|HH> + sin(theta)|VV>, theta in radians within [0, pi/2].
PureTwoQubitState swpe_state(double theta);

/// (|HH> + |VV>)/sqrt(2).
PureTwoQubitState phi_plus();

/// 2|a d - b c| for amplitudes (a, b, c, d).
double concurrence(const PureTwoQubitState& state);

/// Single-qubit projector onto the given port of an analyzer set to `angle_deg`.
Matrix2c linear_projector(double angle_deg, Port port);
/// Single-qubit projector for one of the three standard bases (R/L via a quarter-wave plate).
Matrix2c basis_projector(PolarizationBasis basis, Port port);

double coincidence_prob(const DensityMatrix& rho, const AnalyzerSetting& setting, DetectorPair outcome);
double coincidence_prob(const DensityMatrix& rho, PolarizationBasis basis, DetectorPair outcome);

/// p11 + p22 - p12 - p21.
double correlation(const DensityMatrix& rho, const AnalyzerSetting& setting);

struct ChshAngles {
  double stokes_deg = 0.0;
  double stokes_prime_deg = 45.0;
  double antistokes_deg = 22.5;
  double antistokes_prime_deg = 67.5;
};

inline constexpr ChshAngles kCanonicalChsh{};

/// |E(a,b) - E(a,b') + E(a',b) + E(a',b')|.
double chsh(const DensityMatrix& rho, const ChshAngles& angles = kCanonicalChsh);

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Hermitian square root. Eigenvalues in [-1e-9, 0) are clipped, more negative ones throw DomainError.
Matrix4c psd_sqrt(const Matrix4c& hermitian);

/// Two-qubit Pauli expectations <sigma_i (x) sigma_j>, (i, j) != (0, 0), in row-major
/// order over {I, X, Y, Z} x {I, X, Y, Z}: IX, IY, IZ, XI, XX, ..., ZZ.
using PauliExpectations = std::array<double, 15>;

PauliExpectations pauli_expectations(const DensityMatrix& rho);

/// Linear inversion followed by projection onto the nearest PSD unit-trace matrix.
DensityMatrix tomography_reconstruct(const PauliExpectations& expectations);

}  // namespace muxlink::quantum
