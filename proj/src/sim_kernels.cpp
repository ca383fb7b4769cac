// OpenMP runner. Blocks are seeded by index, so the thread schedule cannot change the result.

#include <vector>

#include <omp.h>

#include "muxlink/errors.hpp"
#include "muxlink/trial_sim.hpp"

namespace muxlink::sim {

CountsTable run_simulation(std::uint64_t seed, const InterfaceParams& ip, const TimingConfig& t,
                           PolarizationBasis basis, std::uint64_t cycles, Sampler sampler) {
  if (cycles == 0) throw DomainError("cycles must be >= 1");
  const CycleModel model(ip, t, basis);
  const auto blocks = static_cast<std::int64_t>((cycles + kBlockCycles - 1) / kBlockCycles);
  std::vector<CountsTable> parts(static_cast<std::size_t>(blocks));

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const std::uint64_t n = std::min(kBlockCycles, cycles - ub * kBlockCycles);
    parts[static_cast<std::size_t>(b)] = run_block(model, seed, ub, n, sampler);
  }

  CountsTable total;
  total.basis = basis;
  total.sources.resize(model.m());
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace muxlink::sim
