#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fwscale/measures.hpp"
#include "fwscale/models.hpp"
#include "fwscale/spectral.hpp"
#include "fwscale/transport.hpp"
#include "fwscale/walsh.hpp"

namespace fwscale {
namespace {

void BM_FastWalshHadamard(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(std::size_t{1} << n);
  for (double& v : x) v = u(rng);
  for (auto _ : state) {
    FastWalshHadamard(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_FastWalshHadamard)->DenseRange(10, 20, 5);

void BM_SolveTransport(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> a(m, 1.0 / m), b(m, 1.0 / m), cost(m * m);
  for (double& c : cost) c = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(SolveTransport(a, b, cost).cost);
}
BENCHMARK(BM_SolveTransport)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMillisecond);

void BM_RandomWalkVsBrownian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AtomicMeasure brownian = BrownianQuantiles(1.0, 1024);
  const AtomicMeasure walk = SemigroupHandle::Discrete(RandomWalkStep(n), n).MuT(Dyadic::FromInt(1));
  for (auto _ : state) benchmark::DoNotOptimize(KrDistance(walk, brownian, 1 << 21));
}
BENCHMARK(BM_RandomWalkVsBrownian)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_InclusionExclusionExact(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ModelSpec spec = BuiltinModel("coalescing_flow");
  const GridSpec grid{spec.level_measure(n), spec.CellsAt(n)};
  Budget budget;
  budget.mode = Mode::kExact;
  for (auto _ : state) benchmark::DoNotOptimize(SpectralMeasureIe(spec.psi, grid, budget).c_n);
}
BENCHMARK(BM_InclusionExclusionExact)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

void BM_MonteCarloSecondMoment(benchmark::State& state) {
  ModelOptions options;
  options.psi = "second_chaos";
  const ModelSpec spec = BuiltinModel("random_walk", options);
  const int n = static_cast<int>(state.range(0));
  const GridSpec grid{spec.level_measure(n), spec.CellsAt(n)};
  Budget budget;
  budget.mode = Mode::kMonteCarlo;
  budget.mc_samples = 10000;
  const ClosedSet e = ClosedSet::Range(grid.cells, 0, grid.cells / 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ConditionalSecondMoment(spec.psi, grid, e, budget).value);
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_MonteCarloSecondMoment)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fwscale

BENCHMARK_MAIN();
