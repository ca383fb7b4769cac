// Serial reference vs OpenMP runner, and the geometric-jump sampler vs the per-trial one.

#include <benchmark/benchmark.h>

#include "muxlink/scenario.hpp"
#include "muxlink/trial_sim.hpp"

namespace {

using namespace muxlink;

const detection::InterfaceParams& interface() {
  static const auto ip = io::default_interface(6);
  return ip;
}

void BM_Serial(benchmark::State& state) {
  const auto cycles = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sim::run_simulation_serial(7, interface(), {}, quantum::PolarizationBasis::kHV, cycles, sim::Sampler::kFast));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Parallel(benchmark::State& state) {
  const auto cycles = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sim::run_simulation(7, interface(), {}, quantum::PolarizationBasis::kHV, cycles, sim::Sampler::kFast));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_NaiveSampler(benchmark::State& state) {
  const auto cycles = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sim::run_simulation(7, interface(), {}, quantum::PolarizationBasis::kHV, cycles, sim::Sampler::kNaive));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NaiveSampler)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
