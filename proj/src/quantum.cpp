#include "muxlink/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "muxlink/errors.hpp"

namespace muxlink::quantum {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kNegativeEigenTol = 1e-9;

Matrix2c pauli(int index) {
  Matrix2c m;
  switch (index) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

Matrix2c ket_projector(const Eigen::Vector2cd& ket) { return ket * ket.adjoint(); }

double born(const DensityMatrix& rho, const Matrix2c& stokes, const Matrix2c& antistokes) {
  return (rho.matrix() * kron(stokes, antistokes)).trace().real();
}

}  // namespace

std::string_view to_string(PolarizationBasis basis) {
  switch (basis) {
    case PolarizationBasis::kHV: return "HV";
    case PolarizationBasis::kDA: return "DA";
    case PolarizationBasis::kRL: return "RL";
  }
  return "?";
}

PolarizationBasis parse_basis(std::string_view text) {
  if (text == "HV" || text == "H-V") return PolarizationBasis::kHV;
  if (text == "DA" || text == "D-A") return PolarizationBasis::kDA;
  if (text == "RL" || text == "R-L") return PolarizationBasis::kRL;
  throw DomainError("unknown polarization basis '" + std::string(text) + "'");
}

PureTwoQubitState::PureTwoQubitState(const Vector4c& amplitudes) : amplitudes_(amplitudes) {
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12) throw DomainError("state vector is not normalized");
}

DensityMatrix::DensityMatrix(const Matrix4c& entries) : entries_(entries) {
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
    throw DomainError("density matrix is not Hermitian");
  const Complex trace = entries_.trace();
  if (std::abs(trace.real() - 1.0) > kTraceTol || std::abs(trace.imag()) > kTraceTol)
    throw DomainError("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(entries_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kNegativeEigenTol)
    throw DomainError("density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::pure(const PureTwoQubitState& state) {
  return DensityMatrix(state.amplitudes() * state.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(Matrix4c::Identity() / 4.0); }

DensityMatrix DensityMatrix::werner(const PureTwoQubitState& state, double visibility) {
  if (visibility < 0.0 || visibility > 1.0) throw DomainError("Werner visibility outside [0, 1]");
  const Matrix4c projector = state.amplitudes() * state.amplitudes().adjoint();
  return DensityMatrix(visibility * projector + (1.0 - visibility) * Matrix4c::Identity() / 4.0);
}

PureTwoQubitState swpe_state(double theta) {
  if (!(theta >= 0.0 && theta <= kPi / 2.0)) throw DomainError("Clebsch-Gordan angle outside [0, pi/2]");
  Vector4c amps = Vector4c::Zero();
  amps[0] = std::cos(theta);
  amps[3] = std::sin(theta);
  return PureTwoQubitState(amps);
}

PureTwoQubitState phi_plus() { return swpe_state(kPi / 4.0); }

double concurrence(const PureTwoQubitState& state) {
  return 2.0 * std::abs(state[0] * state[3] - state[1] * state[2]);
}

Matrix2c linear_projector(double angle_deg, Port port) {
  const double angle = (angle_deg + (port == Port::kReflect ? 90.0 : 0.0)) * kPi / 180.0;
  Eigen::Vector2cd ket(std::cos(angle), std::sin(angle));
  return ket_projector(ket);
}

Matrix2c basis_projector(PolarizationBasis basis, Port port) {
  switch (basis) {
    case PolarizationBasis::kHV: return linear_projector(0.0, port);
    case PolarizationBasis::kDA: return linear_projector(45.0, port);
    case PolarizationBasis::kRL: {
      const double s = 1.0 / std::sqrt(2.0);
      const Complex phase = port == Port::kTransmit ? Complex(0, 1) : Complex(0, -1);
      Eigen::Vector2cd ket(s, s * phase);
      return ket_projector(ket);
    }
  }
  throw DomainError("unknown basis");
}

double coincidence_prob(const DensityMatrix& rho, const AnalyzerSetting& setting, DetectorPair outcome) {
  return born(rho, linear_projector(setting.stokes_deg, outcome.stokes),
              linear_projector(setting.antistokes_deg, outcome.antistokes));
}

double coincidence_prob(const DensityMatrix& rho, PolarizationBasis basis, DetectorPair outcome) {
  return born(rho, basis_projector(basis, outcome.stokes), basis_projector(basis, outcome.antistokes));
}

double correlation(const DensityMatrix& rho, const AnalyzerSetting& setting) {
  double e = 0.0;
  for (const auto& outcome : kAllOutcomes) {
    const double sign = outcome.stokes == outcome.antistokes ? 1.0 : -1.0;
    e += sign * coincidence_prob(rho, setting, outcome);
  }
  return e;
}

double chsh(const DensityMatrix& rho, const ChshAngles& a) {
  const double e_ab = correlation(rho, {a.stokes_deg, a.antistokes_deg});
  const double e_abp = correlation(rho, {a.stokes_deg, a.antistokes_prime_deg});
  const double e_apb = correlation(rho, {a.stokes_prime_deg, a.antistokes_deg});
  const double e_apbp = correlation(rho, {a.stokes_prime_deg, a.antistokes_prime_deg});
  return std::abs(e_ab - e_abp + e_apb + e_apbp);
}

Matrix4c psd_sqrt(const Matrix4c& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(hermitian);
  // Eigenvalues at the rounding floor are zeros; their square roots would be ~1e-8 noise.
  const double floor = 16 * std::numeric_limits<double>::epsilon() * solver.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::Vector4d roots;
  for (int i = 0; i < 4; ++i) {
    const double lambda = solver.eigenvalues()[i];
    if (lambda < -kNegativeEigenTol) throw DomainError("matrix square root of a non-PSD matrix");
    roots[i] = lambda > floor ? std::sqrt(lambda) : 0.0;
  }
  return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().adjoint();
}

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  // Tr sqrt(sqrt(rho) sigma sqrt(rho)) is the trace norm of sqrt(rho) sqrt(sigma). Singular values
  // avoid taking square roots of the near-zero eigenvalues of the sandwiched product.
  const Matrix4c product = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
  const double norm = Eigen::JacobiSVD<Matrix4c>(product).singularValues().sum();
  return std::clamp(norm * norm, 0.0, 1.0);
}

PauliExpectations pauli_expectations(const DensityMatrix& rho) {
  PauliExpectations out{};
  int k = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == 0 && j == 0) continue;
      out[k++] = (rho.matrix() * kron(pauli(i), pauli(j))).trace().real();
    }
  return out;
}

DensityMatrix tomography_reconstruct(const PauliExpectations& expectations) {
  Matrix4c linear = Matrix4c::Identity();
  int k = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == 0 && j == 0) continue;
      linear += expectations[k++] * kron(pauli(i), pauli(j));
    }
  linear /= 4.0;
  linear = (linear + linear.adjoint()) / 2.0;

  Eigen::SelfAdjointEigenSolver<Matrix4c> solver(linear);
  Eigen::Vector4d clipped = solver.eigenvalues().cwiseMax(0.0);
  const double total = clipped.sum();
  // Only reachable when every eigenvalue was negative; fall back to the mixed state.
  if (total <= 0.0) return DensityMatrix::maximally_mixed();
  clipped /= total;
  Matrix4c projected = solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().adjoint();
  projected = (projected + projected.adjoint()) / 2.0;
  return DensityMatrix(projected);
}

}  // namespace muxlink::quantum
