#pragma once

// Point estimates with Poisson-bootstrap error bars from click counts.

#include <array>
#include <cstdint>
#include <vector>

#include "muxlink/quantum.hpp"
#include "muxlink/trial_sim.hpp"

namespace muxlink::sim {

struct EstimateWithError {
  double value = 0.0;
  double sigma = 0.0;
};

inline constexpr int kBootstrapReplicas = 1000;
inline constexpr std::uint64_t kBootstrapSeed = 0x5eed'b007ULL;

struct BootstrapOptions {
  int replicas = kBootstrapReplicas;
  std::uint64_t seed = kBootstrapSeed;
};

/// (C - N)/(C + N) on source-summed counts; throws UndefinedEstimate if C + N == 0.
EstimateWithError estimate_visibility(double matched, double mismatched, const BootstrapOptions& opt = {});
EstimateWithError estimate_visibility(const CountsTable& counts, const BootstrapOptions& opt = {});

/// Two-detector counts at one analyzer setting: n[stokes port][antistokes port], port 0 = transmit.
struct SettingCounts {
  std::array<std::array<double, 2>, 2> n{};

  double total() const noexcept { return n[0][0] + n[0][1] + n[1][0] + n[1][1]; }
  SettingCounts& operator+=(const SettingCounts& o) noexcept;
};

/// Settings in the order (a, b), (a, b'), (a', b), (a', b').
using ChshCounts = std::array<SettingCounts, 4>;

double correlation_from_counts(const SettingCounts& c);

/// |E(a,b) - E(a,b') + E(a',b) + E(a',b')|; throws UndefinedEstimate on an empty setting.
EstimateWithError estimate_chsh(const ChshCounts& counts, const BootstrapOptions& opt = {});

/// Composite Bell parameter of a multiplexed interface: per-source counts summed before estimating.
EstimateWithError estimate_chsh(const std::vector<ChshCounts>& per_source, const BootstrapOptions& opt = {});

/// Unweighted mean of per-source values; sigma combines the inputs in quadrature.
EstimateWithError estimate_average_bell(const std::vector<EstimateWithError>& per_source);

/// Expected counts, `total` coincidences per setting, from the Born rule.
ChshCounts expected_chsh_counts(const quantum::DensityMatrix& rho, double total,
                                const quantum::ChshAngles& angles = quantum::kCanonicalChsh);

/// Multinomial draw of `shots` coincidences per setting.
ChshCounts sample_chsh_counts(const quantum::DensityMatrix& rho, std::uint64_t shots, Rng& rng,
                              const quantum::ChshAngles& angles = quantum::kCanonicalChsh);

/// Pauli expectations measured with `shots` per product basis (9 bases, each yielding
/// the correlator and both marginals). shots == 0 returns the exact values.
quantum::PauliExpectations measure_pauli_expectations(const quantum::DensityMatrix& rho, std::uint64_t shots,
                                                      Rng& rng);

}  // namespace muxlink::sim
