#pragma once

// First-order detection probabilities, rates and visibilities for an array of
// spin-wave/photon entanglement sources read out through a shared router.
//
// Everything here is per write trial unless a rate (s^-1) is asked for.

#include <array>
#include <cstddef>
#include <vector>

#include "muxlink/quantum.hpp"

namespace muxlink::detection {

using quantum::PolarizationBasis;

/// Fraction of photons sent to the wrong detector at the Stokes (a) and anti-Stokes (b) PBS.
struct Crosstalk {
  double stokes = 0.0;
  double antistokes = 0.0;

  double sum() const noexcept { return stokes + antistokes; }
  bool operator==(const Crosstalk&) const = default;
};

struct SourceParams {
  double chi = 0.0;                        // excitation probability per write pulse
  double theta = quantum::kRubidiumTheta;  // Clebsch-Gordan angle (rad)
  double gamma = 0.157;                    // retrieval efficiency
  double eta_s = 0.29;                     // Stokes detection efficiency
  double eta_t = 0.29;                     // anti-Stokes detection efficiency
  double eta_rc = 1.0;                     // router transmission (switch x common fiber)
  double background = 0.0;                // G, noise probability per trial per channel
  std::array<Crosstalk, 3> crosstalk{};    // indexed by PolarizationBasis

  const Crosstalk& crosstalk_for(PolarizationBasis basis) const {
    return crosstalk[static_cast<std::size_t>(basis)];
  }
  Crosstalk& crosstalk_for(PolarizationBasis basis) { return crosstalk[static_cast<std::size_t>(basis)]; }

  /// Throws DomainError when a field leaves its physical range.
  void validate() const;

  bool operator==(const SourceParams&) const = default;
};

/// Whether joints carry the uncorrelated p_S * p_T product of independent clicks in one trial.
enum class AccidentalModel { kPerTrial, kNone };

/// Order-dependent suppression of later sources under feed-forward stopping.
///   kAverage:    (1 - mean p_S)^(i-1), the closed form used for analysis.
///   kSequential: prod_{j<i} (1 - p_S^(j)), what the cycle simulator realizes exactly.
enum class DepletionModel { kAverage, kSequential };

struct InterfaceParams {
  std::vector<SourceParams> sources;
  double rate = 6.7e5;  // write trials per second
  AccidentalModel accidentals = AccidentalModel::kPerTrial;

  std::size_t m() const noexcept { return sources.size(); }
  void validate() const;
  /// chi * m below 0.3 for every source; above that the first-order tables drift.
  bool first_order_valid() const;

  bool operator==(const InterfaceParams&) const = default;
};

/// One source, one basis. X is the detector-1 polarization (H, D or R), Y the detector-2 one.
struct ProbTableRow {
  PolarizationBasis basis = PolarizationBasis::kHV;
  double stokes_x = 0, stokes_y = 0;
  double antistokes_x = 0, antistokes_y = 0;
  double xx = 0, yy = 0, xy = 0, yx = 0;  // (Stokes detector, anti-Stokes detector)

  double stokes() const noexcept { return stokes_x + stokes_y; }
  double antistokes() const noexcept { return antistokes_x + antistokes_y; }
  double joint_total() const noexcept { return xx + yy + xy + yx; }
  /// Coincidences counted as correlated: parallel pairs, or anti-parallel ones in R-L.
  double matched() const noexcept;
  double mismatched() const noexcept;
  /// P(anti-Stokes detector | Stokes detector), before routing. Indexed [stokes][antistokes].
  std::array<std::array<double, 2>, 2> conditional() const;
};

struct ProbTable {
  PolarizationBasis basis = PolarizationBasis::kHV;
  std::vector<ProbTableRow> rows;

  double stokes_total() const;
  double matched_total() const;
  double mismatched_total() const;
};

/// R (Stokes detections), C (matched coincidences), N (mismatched coincidences), all per second.
struct Rates {
  double stokes = 0.0;
  double coincidence = 0.0;
  double cross = 0.0;
};

/// Deficit Z and slope K of the linearized visibility (1 - Z) - K * chi.
struct VisibilityFit {
  double deficit = 0.0;
  double slope = 1.0;
};

ProbTableRow prob_table(const SourceParams& p, PolarizationBasis basis,
                        AccidentalModel accidentals = AccidentalModel::kPerTrial);

Rates single_source_rates(const SourceParams& p, double rate, PolarizationBasis basis,
                          AccidentalModel accidentals = AccidentalModel::kPerTrial);

/// |C - N| / (C + N). Throws UndefinedEstimate when there are no coincidences.
double single_source_visibility(const SourceParams& p, PolarizationBasis basis,
                                AccidentalModel accidentals = AccidentalModel::kPerTrial);

/// Closed-form (Z, K) for the basis. Requires gamma > 0.
VisibilityFit visibility_fit(const SourceParams& p, PolarizationBasis basis);

inline double linear_visibility(const VisibilityFit& fit, double chi) {
  return (1.0 - fit.deficit) - fit.slope * chi;
}

/// Mean single-source Stokes detection probability, the p_bar of the depletion factor.
double mean_stokes_probability(const InterfaceParams& ip, PolarizationBasis basis = PolarizationBasis::kHV);

/// Depletion factor for each source in priority order.
std::vector<double> depletion_factors(const InterfaceParams& ip, DepletionModel model,
                                      PolarizationBasis basis = PolarizationBasis::kHV);

/// Singles scaled by the depletion factor; joints additionally by eta_rc.
ProbTable multiplexed_prob_table(const InterfaceParams& ip, PolarizationBasis basis,
                                 DepletionModel depletion = DepletionModel::kAverage);

Rates multiplexed_rates(const InterfaceParams& ip, PolarizationBasis basis,
                        DepletionModel depletion = DepletionModel::kAverage);

/// Coincidence-weighted mean of per-source visibilities.
double composite_visibility(const InterfaceParams& ip, PolarizationBasis basis,
                            DepletionModel depletion = DepletionModel::kAverage);

/// Both composite forms from one table: weighted sum and pooled (C - N)/(C + N).
double weighted_visibility(const ProbTable& table);
double pooled_visibility(const ProbTable& table);

/// CHSH value at the canonical angles, sqrt(2) * (E_HV + E_DA), for states whose
/// correlation tensor is diagonal in the H/V, D/A frame.
double canonical_bell(double visibility_hv, double visibility_da);

/// Source i run alone with the router removed (eta_rc = 1).
InterfaceParams non_multiplexed(const InterfaceParams& ip, std::size_t index);

InterfaceParams with_equal_chi(InterfaceParams ip, double chi);

/// Equal chi that makes the multiplexed Stokes probability p_S^(m) equal `target`.
double solve_equal_chi_for_stokes(const InterfaceParams& ip, double target,
                                  DepletionModel depletion = DepletionModel::kAverage);

struct Enhancement {
  double chi_single = 0.0;       // chi giving the target visibility on the average single source
  double chi_multiplexed = 0.0;  // same for the multiplexed interface
  double stokes_ratio = 0.0;     // R^(m) / R_bar at equal visibility
  double coincidence_ratio = 0.0;
};

/// Average non-multiplexed source curves against the multiplexed interface, both at
/// visibility `target`, solved on the falling branch of V(chi).
Enhancement enhancement_at_visibility(const InterfaceParams& ip, PolarizationBasis basis, double target,
                                      DepletionModel depletion = DepletionModel::kAverage);

/// chi -> 0 limit of the fixed-visibility enhancement with background removed.
Enhancement enhancement_limit(const InterfaceParams& ip, PolarizationBasis basis);

/// Linearized composite law with the background share of the deficit made explicit, so the
/// deficit can follow the retrieval efficiency: Z(gamma) = Z_ref + 2G (1/gamma - 1/gamma_ref).
struct LinearLaw {
  double deficit = 0.0;
  double slope = 0.0;
  double background = 0.0;
  double gamma_ref = 0.157;

  double deficit_at(double gamma) const;
  double visibility(double chi_bar) const { return (1.0 - deficit) - slope * chi_bar; }
  double visibility(double chi_bar, double gamma) const { return (1.0 - deficit_at(gamma)) - slope * chi_bar; }
};

/// Clamp to [0, 1]; throws RegimeError if the value was out of range by more than 1e-9.
double checked_probability(double value);

}  // namespace muxlink::detection
