#include <benchmark/benchmark.h>

#include <levymix/functional.hpp>
#include <levymix/levy.hpp>
#include <levymix/statistic.hpp>
#include <levymix/stein.hpp>

using namespace levymix;

namespace {

void BM_StableDraw(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 10.0;
  RngStream rng(1, 0, StreamRole::path);
  for (auto _ : state) benchmark::DoNotOptimize(sample_stable_standard(alpha, rng));
}
BENCHMARK(BM_StableDraw)->Arg(7)->Arg(15)->Arg(20);

void BM_SamplePath(benchmark::State& state) {
  const LevyModel model = LevyModel::stable(1.5);
  GridSpec grid;
  grid.n = state.range(0);
  grid.horizon = 1.0;
  grid.window = 1;
  std::uint64_t rep = 0;
  for (auto _ : state) {
    RngStream rng(2, rep++, StreamRole::path);
    benchmark::DoNotOptimize(sample_path(model, grid, rng));
  }
  state.SetItemsProcessed(state.iterations() * grid.increments_needed());
}
BENCHMARK(BM_SamplePath)->Range(64, 4096);

void BM_ComputeZ(benchmark::State& state) {
  const LevyModel model = LevyModel::stable(1.5);
  GridSpec grid;
  grid.n = state.range(0);
  grid.horizon = 1.0;
  grid.window = 1;
  auto g = std::make_shared<CosineFunctional>(
      WeightFunction::cosine({1.0}), std::vector<std::vector<double>>{{1.0}, {0.8}});
  const CenteredFunctional f = CenteredFunctional::exact(g, model);
  RngStream rng(3, 0, StreamRole::path);
  const PathSample path = sample_path(model, grid, rng);
  for (auto _ : state) benchmark::DoNotOptimize(compute_Z(path, f, grid));
  state.SetItemsProcessed(state.iterations() * grid.steps());
}
BENCHMARK(BM_ComputeZ)->Range(64, 4096);

void BM_SteinSolve(benchmark::State& state) {
  const TestFunction psi = TestFunction::sinusoid(1.0, 1.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_stein(psi, 1.0));
}
BENCHMARK(BM_SteinSolve);

}  // namespace

BENCHMARK_MAIN();
