// Serial reference vs OpenMP fan-out for the two path-parallel kernels.

#include <benchmark/benchmark.h>

#include "frameflow/group_process.hpp"
#include "frameflow/homogenize.hpp"

using namespace frameflow;

namespace {

Execution mode_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_Ensemble(benchmark::State& state) {
  EnsembleSpec spec;
  spec.base = SimConfig::defaults(resolve_chart("hyperbolic2"), 0.05, 0.5, 1);
  spec.paths = static_cast<int>(state.range(1));
  spec.execution = mode_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_ensemble(spec).msd.back());
  state.SetItemsProcessed(state.iterations() * spec.paths);
  state.SetLabel(spec.execution == Execution::serial ? "serial" : "parallel");
}

void BM_HaarMoments(benchmark::State& state) {
  const int n = 4;
  const Vec e0 = unit_vector(n, 0);
  const int samples = static_cast<int>(state.range(1));
  const Execution mode = mode_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(haar_second_moments(n, e0, samples, 1, mode).mean(0, 0));
  state.SetItemsProcessed(state.iterations() * samples);
  state.SetLabel(mode == Execution::serial ? "serial" : "parallel");
}

void BM_PathStep(benchmark::State& state) {
  const SimConfig cfg = SimConfig::defaults(resolve_chart("euclidean:" + std::to_string(state.range(0))), 0.1, 1.0, 1);
  const PerturbedGeodesic kernel(cfg);
  SimState s = kernel.initial_state();
  RandomStream rng(1, StreamPurpose::testing, 0);
  std::vector<double> xi(static_cast<std::size_t>(kernel.noise_per_step()));
  for (auto _ : state) {
    rng.fill_normal(xi);
    kernel.advance(s, xi);
    kernel.renormalize_frame(s);
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

BENCHMARK(BM_Ensemble)->Args({0, 200})->Args({1, 200})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HaarMoments)->Args({0, 100000})->Args({1, 100000})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PathStep)->Arg(2)->Arg(3)->Arg(5);

BENCHMARK_MAIN();
