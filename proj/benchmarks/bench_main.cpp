#include <benchmark/benchmark.h>

#include <random>

#include "koopsub/dictionary.hpp"
#include "koopsub/dynamics.hpp"
#include "koopsub/linalg.hpp"
#include "koopsub/network.hpp"
#include "koopsub/pssd.hpp"
#include "koopsub/ssd.hpp"

using namespace koopsub;

namespace {

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

struct Example1 {
  SnapshotSet snapshots;
  MonomialDictionary dict;
};

Example1 example1(Index samples) {
  const auto sys = DynamicalSystem::unstable_nonlinear();
  return {generate_snapshots(sys, Region::of(Box::cube(2, -3, 3)), samples, 1,
                             {SignaturePolicy::Kind::first, 15}),
          monomials_up_to_degree(2, 4)};
}

}  // namespace

static void BM_Svd(benchmark::State& state) {
  const Matrix a = gaussian(state.range(0), state.range(1), 1);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::svd(a));
}
BENCHMARK(BM_Svd)->Args({200, 15})->Args({1000, 66})->Args({2000, 132});

static void BM_RangeIntersection(benchmark::State& state) {
  const Index n = state.range(0);
  const Tolerances tol;
  const ColumnBasis a = linalg::orthonormal_basis(gaussian(n, n / 2 + 2, 2), tol);
  const ColumnBasis b = linalg::orthonormal_basis(gaussian(n, n / 2 + 2, 3), tol);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::range_intersection_basis(a, b, tol));
}
BENCHMARK(BM_RangeIntersection)->Arg(15)->Arg(66);

static void BM_Ssd(benchmark::State& state) {
  const Example1 e = example1(state.range(0));
  const Matrix dx = evaluate(e.dict, e.snapshots.x);
  const Matrix dy = evaluate(e.dict, e.snapshots.y);
  for (auto _ : state) benchmark::DoNotOptimize(ssd(dx, dy));
}
BENCHMARK(BM_Ssd)->Arg(1000)->Arg(10000);

static void BM_PssdRound(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Example1 e = example1(1000);
  const DataPartition p = partition_data(e.snapshots, e.dict, m, {});
  const auto data = make_agent_data(e.snapshots, e.dict, p);
  const Digraph g = ring_digraph(m);
  const Tolerances tol;
  const auto agents = initial_agents(m, e.dict.size());
  for (auto _ : state) benchmark::DoNotOptimize(pssd_round(agents, data, g, tol));
}
BENCHMARK(BM_PssdRound)->Arg(2)->Arg(5)->Arg(10);

static void BM_RunPssd(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const Example1 e = example1(2000);
  const DataPartition p = partition_data(e.snapshots, e.dict, m, {});
  const auto data = make_agent_data(e.snapshots, e.dict, p);
  const auto schedule = DigraphSchedule::fixed(ring_digraph(m));
  const Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(run_pssd(data, schedule, tol));
}
BENCHMARK(BM_RunPssd)->Arg(5)->Arg(20);
BENCHMARK_MAIN();
