#include <benchmark/benchmark.h>

#include "expint/integrators.hpp"
#include "expint/problems.hpp"

namespace {

using namespace expint;

Problem<double> problem_by_index(int index) {
  switch (index) {
    case 0: return wind_oscillation();
    case 1: return allen_cahn();
    default: return nls_pseudospectral();
  }
}

void BM_Step(benchmark::State& state, MethodId id) {
  const auto p = problem_by_index(static_cast<int>(state.range(0)));
  const auto method = make_method<double>(id);
  const double h = 1.0 / 512;
  const auto cache = CoefficientCache<double>::build(method, p.m, h);
  State y = p.y0;
  for (auto _ : state) {
    auto r = step(method, cache, p, y);
    benchmark::DoNotOptimize(r.y_next.data());
  }
  state.SetLabel(p.label);
}

void BM_CacheBuild(benchmark::State& state, MethodId id) {
  const auto p = problem_by_index(static_cast<int>(state.range(0)));
  const auto method = make_method<double>(id);
  for (auto _ : state) {
    auto cache = CoefficientCache<double>::build(method, p.m, 1.0 / 512);
    benchmark::DoNotOptimize(&cache);
  }
  state.SetLabel(p.label);
}

void BM_Matexp(benchmark::State& state) {
  const auto n = state.range(0);
  const DenseMatrix a = DenseMatrix::Random(n, n) * 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(matexp(a).data());
}

void BM_PhiSet(benchmark::State& state) {
  const auto n = state.range(0);
  const DenseMatrix a = DenseMatrix::Random(n, n) * 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(phi_set(a, 3).matrices.data());
}

}  // namespace

BENCHMARK_CAPTURE(BM_Step, mverk41, MethodId::mverk41)->DenseRange(0, 2);
BENCHMARK_CAPTURE(BM_Step, mverk42, MethodId::mverk42)->DenseRange(0, 2);
BENCHMARK_CAPTURE(BM_Step, sverk41, MethodId::sverk41)->DenseRange(0, 2);
BENCHMARK_CAPTURE(BM_Step, sverk42, MethodId::sverk42)->DenseRange(0, 2);
BENCHMARK_CAPTURE(BM_Step, rk4, MethodId::rk4)->DenseRange(0, 2);
BENCHMARK_CAPTURE(BM_Step, erk_hochbruck5, MethodId::erk_hochbruck5)->DenseRange(0, 2);
BENCHMARK_CAPTURE(BM_Step, erk_krogstad4, MethodId::erk_krogstad4)->DenseRange(0, 2);
BENCHMARK_CAPTURE(BM_CacheBuild, mverk41, MethodId::mverk41)->DenseRange(0, 2);
BENCHMARK_CAPTURE(BM_CacheBuild, sverk41, MethodId::sverk41)->DenseRange(0, 2);
BENCHMARK_CAPTURE(BM_CacheBuild, erk_hochbruck5, MethodId::erk_hochbruck5)->DenseRange(0, 2);
BENCHMARK(BM_Matexp)->Arg(4)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_PhiSet)->Arg(4)->Arg(16)->Arg(32);
BENCHMARK_MAIN();
