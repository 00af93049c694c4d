#include <benchmark/benchmark.h>

#include "dynsymlab/evolve.hpp"
#include "dynsymlab/finder.hpp"
#include "dynsymlab/models.hpp"

using namespace dynsymlab;

namespace {

void BM_BuildHeisenberg(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_heisenberg_nnn(n, 1.0, 1.0));
  }
}
BENCHMARK(BM_BuildHeisenberg)->Arg(6)->Arg(8)->Arg(10);

void BM_SparseCommutator(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LatticeOperator h = build_heisenberg_nnn(n, 1.0, 1.0);
  const LatticeOperator s =
      compile(uniform_extensive(pauli_basis()[0], h.spec));
  for (auto _ : state) {
    benchmark::DoNotOptimize(commutator(h, s));
  }
}
BENCHMARK(BM_SparseCommutator)->Arg(6)->Arg(8)->Arg(10);

void BM_ProjectedAdjoint(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LatticeOperator h = build_heisenberg_nnn(n, 1.0, 1.0);
  const CandidateSpace space = build_candidate_space(h.spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(projected_adjoint(h, space));
  }
}
BENCHMARK(BM_ProjectedAdjoint)->Arg(6)->Arg(8);

void BM_FindEigenoperators(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LatticeOperator h = build_heisenberg_nnn(n, 1.0, 1.0);
  const CandidateSpace space = build_candidate_space(h.spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_eigenoperators(h, space));
  }
}
BENCHMARK(BM_FindEigenoperators)->Arg(6)->Arg(8);

void BM_Diagonalize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LatticeOperator h = build_heisenberg_nnn(n, 1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(diagonalize(h));
  }
}
BENCHMARK(BM_Diagonalize)->Arg(6)->Arg(8)->Arg(10);

void BM_ExpectationSeries(benchmark::State& state) {
  const LatticeOperator h = build_heisenberg_nnn(8, 1.0, 1.0);
  const auto spectrum = diagonalize(h);
  const PreparedState psi = prepare_product_state(
      h.spec, default_initial_state(h.spec, "tilted"), spectrum, "tilted");
  const LatticeOperator obs = embed(pauli_basis()[0], 1, h.spec);
  const TimeGrid grid{0.0, 0.05, static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(expectation_series(obs, psi, spectrum, grid));
  }
}
BENCHMARK(BM_ExpectationSeries)->Arg(256)->Arg(1024);

void BM_BuildHubbard(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_hubbard(l, 1.0, 2.0, 0.5, 0.7));
  }
}
BENCHMARK(BM_BuildHubbard)->Arg(3)->Arg(4)->Arg(5);

}  // namespace

BENCHMARK_MAIN();
