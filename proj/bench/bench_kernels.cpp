#include <benchmark/benchmark.h>

#include "vmsgf/analysis.hpp"
#include "vmsgf/finescale.hpp"
#include "vmsgf/sgfem.hpp"

using namespace vmsgf;

namespace {

AdeProblem five_rv(int n_el, int p) {
  return AdeProblem(1e-3, 1.0, BetaField(equal_regions(1.0, 5), 1.0, 5), GpcBasis(5, p), Mesh1D::uniform(1.0, n_el));
}

AdeProblem single_rv(int n_el, int p) {
  std::vector<Region> regions = {{0.0, 1.0, 1, BetaMap::one_plus_xi_squared()}};
  return AdeProblem(1e-3, 1.0, BetaField(regions, 1.0, 1), GpcBasis(1, p), Mesh1D::uniform(1.0, n_el));
}

void BM_assemble_parallel(benchmark::State& state) {
  const AdeProblem prob = five_rv(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(prob, Method::vms).matrix.nonZeros());
}

void BM_assemble_reference(benchmark::State& state) {
  const AdeProblem prob = five_rv(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::assemble(prob, Method::vms).matrix.nonZeros());
}

void BM_solve_block(benchmark::State& state) {
  const CoupledSystem sys = assemble(five_rv(static_cast<int>(state.range(0)), static_cast<int>(state.range(1))), Method::vms);
  for (auto _ : state) benchmark::DoNotOptimize(solve(sys).coeff(0, 0));
}

void BM_solve_sparse_lu(benchmark::State& state) {
  const CoupledSystem sys = assemble(five_rv(static_cast<int>(state.range(0)), static_cast<int>(state.range(1))), Method::vms);
  for (auto _ : state) benchmark::DoNotOptimize(reference::solve(sys).coeff(0, 0));
}

void BM_moment_matrix_parallel(benchmark::State& state) {
  const FineScaleOperator op(single_rv(20, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(moment_matrix(op.kernel(), op.mesh(), op.basis(), op.rule())(0, 0));
}

void BM_moment_matrix_reference(benchmark::State& state) {
  const FineScaleOperator op(single_rv(20, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(reference::moment_matrix(op.kernel(), op.mesh(), op.basis(), op.rule())(0, 0));
}

void BM_mc_parallel(benchmark::State& state) {
  const AdeProblem prob = single_rv(20, 0);
  for (auto _ : state) benchmark::DoNotOptimize(mc_reference(prob, static_cast<std::size_t>(state.range(0)), 1).mean[0]);
}

void BM_mc_reference(benchmark::State& state) {
  const AdeProblem prob = single_rv(20, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::mc_reference(prob, static_cast<std::size_t>(state.range(0)), 1).mean[0]);
  }
}

}  // namespace

BENCHMARK(BM_assemble_parallel)->Args({20, 2})->Args({40, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_reference)->Args({20, 2})->Args({40, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_solve_block)->Args({20, 2})->Args({40, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_solve_sparse_lu)->Args({20, 2})->Args({40, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_moment_matrix_parallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_moment_matrix_reference)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_parallel)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_reference)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
