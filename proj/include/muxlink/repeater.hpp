#pragma once

// Elementary-link and chain-level figures for a repeater built from multiplexed interfaces.

#include <cstddef>
#include <optional>
#include <vector>

#include "muxlink/quantum.hpp"
#include "muxlink/trial_sim.hpp"

namespace muxlink::repeater {

inline constexpr double kAttenuationLengthKm = 22.0;
inline constexpr double kFiberSpeedKmPerS = 2.0e5;
inline constexpr double kBsmEfficiency = 0.5;

struct LinkParams {
  double length_km = 0.0;  // L0, one elementary link
  double attenuation_km = kAttenuationLengthKm;
  double eta_dc = 1.0;     // frequency conversion, applied to each Stokes photon
  std::size_t m = 1;
  /// Stokes detection probability per channel at the two ends; one entry broadcasts to all m.
  std::vector<double> p_s_a{1.0};
  std::vector<double> p_s_b{1.0};
  double bsm_efficiency = kBsmEfficiency;

  void validate() const;
  double p_s_a_at(std::size_t channel) const;
  double p_s_b_at(std::size_t channel) const;
};

/// 1/2 p_SA p_SB eta_DC^2 exp(-L0 / L_att) for one channel.
double link_success_single(const LinkParams& lp, std::size_t channel = 0);

/// 1 - prod_i (1 - p_i); equals 1 - (1 - p)^m for uniform channels.
double link_success_multiplexed(const LinkParams& lp);

/// Small-p limit, m * p.
double link_success_linear(const LinkParams& lp);

/// 1/2 gamma_A gamma_B eta_SA eta_SB, success of one swapping step.
double swap_success(double gamma_a, double gamma_b, double eta_s_a, double eta_s_b);
inline double swap_success(double gamma, double eta_s) { return swap_success(gamma, gamma, eta_s, eta_s); }

struct ChainParams {
  double length_km = 0.0;  // L = 2^n L0
  std::size_t nesting = 0;
  double fiber_speed_km_s = kFiberSpeedKmPerS;
  std::vector<double> swap_success;  // p_1 .. p_n
  double eta_rc_bar = 1.0;
  std::size_t m = 1;

  void validate() const;
  /// Throws DomainError unless length_km == 2^n * elementary_km (relative 1e-9).
  void check_consistent(double elementary_km) const;
};

/// Either a finite time in seconds or the dedicated unreachable marker.
class TotalTime {
 public:
  static TotalTime finite(double seconds) { return TotalTime(seconds); }
  static TotalTime unreachable() { return TotalTime(); }

  bool reachable() const noexcept { return seconds_.has_value(); }
  /// Throws DomainError when unreachable.
  double seconds() const;

 private:
  TotalTime() = default;
  explicit TotalTime(double s) : seconds_(s) {}
  std::optional<double> seconds_;
};

/// (L/c) (3/2)^n / (p prod p_i), divided by m * eta_rc_bar^(2n) when multiplexed.
TotalTime total_time(const ChainParams& cp, double p_link, bool multiplexed);

/// Multiplexed time without the small-p shortcut: p^(m) exact and eta_rc_bar^2 on every swap.
TotalTime total_time_exact(const ChainParams& cp, const LinkParams& lp);

struct LinkQuality {
  double visibility = 0.0;
  double fidelity = 0.0;
  double bell = 0.0;
};

/// Werner-family quality from a visibility: F = (3V+1)/4, S = 2 sqrt(2) V.
LinkQuality quality_from_visibility(double v);

/// V_AB = V_A V_B, F_AB = (1 + (4F_A - 1)(4F_B - 1)/3)/4, S_AB = S_A S_B / (2 sqrt 2).
LinkQuality product_link_quality(double v_a, double v_b);

struct CompositeLinkQuality {
  double v_a = 0.0;          // composite interface visibilities, Stokes-probability weighted
  double v_b = 0.0;
  LinkQuality product;       // from v_a, v_b
  LinkQuality exact;         // channel-by-channel weighted sum
  double normalization = 0.0;  // sum p_A sum p_B / sum p_A p_B, close to m
};

/// Per-channel visibilities and Stokes detection weights on both ends; zeta scales each channel.
CompositeLinkQuality composite_link_quality(const std::vector<double>& v_a, const std::vector<double>& v_b,
                                            const std::vector<double>& p_a, const std::vector<double>& p_b,
                                            double zeta = 1.0);

struct BsmResult {
  bool success = false;
  std::optional<quantum::PureTwoQubitState> memories;  // (memory A, memory B), |+> = index 0
  double success_probability = 0.0;
  bool phase_corrected = false;
};

/// Probability that the two Stokes photons share a polarization at the PBS.
double bsm_success_probability(const quantum::PureTwoQubitState& a, const quantum::PureTwoQubitState& b);

/// Amplitude of the post-selected four-particle term for excitation probability chi.
double bsm_amplitude_prefactor(double chi, double theta);

/// PBS Bell-state measurement on the Stokes photons of two (Stokes, memory) states, B's photon
/// first rotated H <-> V. On success the D/A outcome fixes the memory state; the odd branch is
/// corrected with Z on memory A.
BsmResult bsm_project(const quantum::PureTwoQubitState& a, const quantum::PureTwoQubitState& b, sim::Rng& rng);

}  // namespace muxlink::repeater
