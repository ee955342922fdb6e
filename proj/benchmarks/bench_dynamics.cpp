#include <benchmark/benchmark.h>

#include "corikit/adaptive.hpp"
#include "corikit/christoffel.hpp"
#include "corikit/dynamics.hpp"
#include "corikit/oracles.hpp"

using namespace corikit;

namespace {

struct Fixture {
  MechanismModel model;
  VecX q, v;
  Fixture(int n, bool chain) {
    model = chain ? oracles::random_open_chain(n, 7, true)
                  : oracles::balanced_revolute_tree(n, 7);
    const auto s = oracles::random_state(model, 11);
    q = s.q;
    v = s.v;
  }
};

}  // namespace

static void BM_CoriolisStar(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(coriolis_star(f.model, f.q, f.v));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CoriolisStar)->RangeMultiplier(2)->Range(8, 256)->Complexity();

static void BM_Rnea(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rnea(f.model, f.q, f.v, f.v, true));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Rnea)->RangeMultiplier(2)->Range(8, 256)->Complexity();

static void BM_MassMatrix(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mass_matrix(f.model, f.q));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MassMatrix)->RangeMultiplier(2)->Range(8, 256)->Complexity();

static void BM_ChristoffelFast(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), false);
  Tensor3 gamma;
  for (auto _ : state) {
    christoffel_fast_into(f.model, f.q, gamma);
    benchmark::DoNotOptimize(gamma);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ChristoffelFast)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_ChristoffelSweep(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), false);
  Tensor3 gamma;
  for (auto _ : state) {
    christoffel_sweep_into(f.model, f.q, gamma);
    benchmark::DoNotOptimize(gamma);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ChristoffelSweep)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_RegressorBundle(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(regressor_bundle(f.model, f.q, f.v, f.v, f.v));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RegressorBundle)->RangeMultiplier(2)->Range(8, 64)->Complexity();

BENCHMARK_MAIN();
