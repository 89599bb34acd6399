#include <benchmark/benchmark.h>

#include "cmclab/energetics.hpp"
#include "cmclab/oracle.hpp"

using namespace cmclab;

namespace {

const ModelSpec& wedge() {
  static const ModelSpec m = wedge_model(2, 1.0, 2.0, 3.0);
  return m;
}

const HeightField& field(double lambda) {
  static const HeightField f100 = solve_cmc_leaf(wedge(), -100.0, {});
  static const HeightField f10k = solve_cmc_leaf(wedge(), -1e4, {});
  return lambda < 1000 ? f100 : f10k;
}

void BM_Solve(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_cmc_leaf(wedge(), -lambda, {}));
}
BENCHMARK(BM_Solve)->Arg(10)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SolveN3(benchmark::State& state) {
  const ModelSpec m = wedge_model(3, 1.0, 2.0, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_cmc_leaf(m, -2.0 * static_cast<double>(state.range(0)), {}));
}
BENCHMARK(BM_SolveN3)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const HeightField& f = field(100);
  const std::vector<int> nodes = interior_nodes(f, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fd_mean_curvature_oracle(f, nodes));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(nodes.size()));
}
BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond);

void BM_DistanceClairaut(benchmark::State& state) {
  const HeightField& f = field(static_cast<double>(state.range(0)));
  const GeodesicQuery q{{1, 0.1, 0.0}, {1, 0.9, 0.5}, DistanceMethod::clairaut, {}};
  for (auto _ : state) benchmark::DoNotOptimize(leaf_distance(f, q));
}
BENCHMARK(BM_DistanceClairaut)->Arg(100)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_DistanceMesh(benchmark::State& state) {
  const HeightField& f = field(static_cast<double>(state.range(0)));
  const GeodesicQuery q{{1, 0.1, 0.0}, {1, 0.9, 0.5}, DistanceMethod::mesh_dijkstra, {}};
  for (auto _ : state) benchmark::DoNotOptimize(leaf_distance(f, q));
}
BENCHMARK(BM_DistanceMesh)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_LeafSamples(benchmark::State& state) {
  const HeightField& f = field(10000);
  for (auto _ : state) benchmark::DoNotOptimize(energy_row(f));
}
BENCHMARK(BM_LeafSamples)->Unit(benchmark::kMillisecond);

void BM_Flatness(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(conformal_flatness_diagnostic(3, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Flatness)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
