#pragma once

// Monte Carlo replay of the feed-forward write/read cycle.
//
// One cycle: up to N write trials; every source's Stokes channel is tried each
// trial in priority order, and the first click stops the sequence. The matching
// anti-Stokes photon is then read out and routed to the detectors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "muxlink/detection.hpp"

namespace muxlink::sim {

using detection::InterfaceParams;
using detection::SourceParams;
using quantum::PolarizationBasis;

/// floor(10 ms / 1.5 us): write trials that fit in one experiment window.
inline constexpr std::uint64_t kDefaultMaxTrials = 6666;

struct TimingConfig {
  double rate = 6.7e5;                        // write trials per second
  std::uint64_t max_trials = kDefaultMaxTrials;
  double storage_us = 1.0;                    // delta t
  double lifetime_us = 66.7;                  // tau

  void validate() const;
  bool operator==(const TimingConfig&) const = default;
};

/// gamma' = gamma * exp(-dt^2 / tau^2). The source's gamma is read as the zero-delay baseline.
SourceParams apply_decay(const SourceParams& p, const TimingConfig& t);
InterfaceParams apply_decay(const InterfaceParams& ip, const TimingConfig& t);

enum class Detector : std::uint8_t { kX = 0, kY = 1 };

struct CycleOutcome {
  std::optional<std::size_t> fired_source;  // 0-based priority index
  std::optional<Detector> stokes_detector;
  std::optional<Detector> antistokes_detector;
  std::uint64_t trials_consumed = 0;
};

struct SourceTally {
  std::uint64_t stokes_x = 0, stokes_y = 0;
  std::uint64_t xx = 0, xy = 0, yx = 0, yy = 0;

  std::uint64_t stokes() const noexcept { return stokes_x + stokes_y; }
  std::uint64_t coincidences() const noexcept { return xx + xy + yx + yy; }
  std::uint64_t stokes_only() const noexcept { return stokes() - coincidences(); }
  std::uint64_t matched(PolarizationBasis basis) const noexcept;
  std::uint64_t mismatched(PolarizationBasis basis) const noexcept;

  SourceTally& operator+=(const SourceTally& other) noexcept;
  bool operator==(const SourceTally&) const = default;
};

struct CountsTable {
  PolarizationBasis basis = PolarizationBasis::kHV;
  std::vector<SourceTally> sources;
  std::uint64_t cycles = 0;
  std::uint64_t trials = 0;

  std::uint64_t matched_total() const noexcept;
  std::uint64_t mismatched_total() const noexcept;
  std::uint64_t stokes_total() const noexcept;

  /// Adds tallies; basis and source count must agree.
  CountsTable& merge(const CountsTable& other);
  bool operator==(const CountsTable&) const = default;
};

/// mt19937_64 with 53-bit uniforms built from the raw output, so streams are portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// In (0, 1], safe for log().
  double uniform_open_zero() { return 1.0 - uniform(); }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Sub-seed of block `index` under master `seed`.
std::uint64_t block_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Per-trial probabilities the sampler draws from, precomputed once per run.
class CycleModel {
 public:
  /// Throws ConfigError if any source's Stokes or conditional anti-Stokes mass exceeds 1.
  CycleModel(const InterfaceParams& ip, const TimingConfig& t, PolarizationBasis basis);

  std::size_t m() const noexcept { return stokes_.size(); }
  PolarizationBasis basis() const noexcept { return basis_; }
  std::uint64_t max_trials() const noexcept { return max_trials_; }
  /// Probability some source clicks in one trial.
  double trial_fire_probability() const noexcept { return fire_; }
  /// [source][detector] Stokes click probability per trial.
  const std::vector<std::array<double, 2>>& stokes() const noexcept { return stokes_; }
  /// [source][stokes detector][antistokes detector], routing included.
  const std::vector<std::array<std::array<double, 2>, 2>>& antistokes() const noexcept { return antistokes_; }

  /// Geometric jump to the first firing trial, then one categorical draw for who fired.
  CycleOutcome sample(Rng& rng) const;
  /// Trial-by-trial, source-by-source reference sampler.
  CycleOutcome sample_naive(Rng& rng) const;

 private:
  std::optional<Detector> sample_antistokes(Rng& rng, std::size_t source, Detector stokes) const;

  PolarizationBasis basis_;
  std::uint64_t max_trials_;
  double fire_ = 0.0;
  double log_no_fire_ = 0.0;
  std::vector<std::array<double, 2>> stokes_;
  std::vector<std::array<std::array<double, 2>, 2>> antistokes_;
  std::vector<double> cumulative_;  // 2m entries, first-click weights in priority order
};

enum class Sampler { kFast, kNaive };

/// Records one cycle into the table.
void tally(CountsTable& table, const CycleOutcome& outcome);

/// Cycles per independently seeded block. Part of the reproducibility contract.
inline constexpr std::uint64_t kBlockCycles = 1 << 14;

/// Reference serial runner: blocks executed in order on the calling thread.
CountsTable run_simulation_serial(std::uint64_t seed, const InterfaceParams& ip, const TimingConfig& t,
                                  PolarizationBasis basis, std::uint64_t cycles, Sampler sampler = Sampler::kFast);

/// OpenMP runner over the same blocks; bit-identical to the serial runner for any thread count.
CountsTable run_simulation(std::uint64_t seed, const InterfaceParams& ip, const TimingConfig& t,
                           PolarizationBasis basis, std::uint64_t cycles, Sampler sampler = Sampler::kFast);

/// One block, shared by both runners.
CountsTable run_block(const CycleModel& model, std::uint64_t seed, std::uint64_t block, std::uint64_t cycles,
                      Sampler sampler);

}  // namespace muxlink::sim
