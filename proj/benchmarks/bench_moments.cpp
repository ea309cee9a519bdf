// Microbenchmarks for the steady-state moment solvers.
#include <benchmark/benchmark.h>

#include "resfluor/model.hpp"
#include "resfluor/moments.hpp"

namespace {

resfluor::SystemParams weak_params() {
    resfluor::SystemParams p;
    p.omega_sigma = 1e-3;
    p.gamma_sigma = 1.0;
    p.Gamma = 0.2;
    p.g = 1e-3;
    return p;
}

void BM_SolveRecursive(benchmark::State& state) {
    const auto params = weak_params();
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto table = resfluor::solve_recursive(params, order);
        benchmark::DoNotOptimize(table.entries);
    }
}
BENCHMARK(BM_SolveRecursive)->Arg(2)->Arg(4)->Arg(8);

void BM_LiouvillianSteadyState(benchmark::State& state) {
    const auto params = weak_params();
    const resfluor::HomodyneConfig h;
    resfluor::TruncationConfig trunc;
    trunc.n_max = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto dens = resfluor::liouvillian_steady_state(params, h, trunc);
        benchmark::DoNotOptimize(dens.matrix);
    }
}
BENCHMARK(BM_LiouvillianSteadyState)->Arg(4)->Arg(6)->Arg(8)
    ->Unit(benchmark::kMillisecond);

void BM_GNFromMoments(benchmark::State& state) {
    const auto table = resfluor::solve_recursive(weak_params(), 8);
    for (auto _ : state) {
        double value = resfluor::gN_from_moments(table, 4);
        benchmark::DoNotOptimize(value);
    }
}
BENCHMARK(BM_GNFromMoments);

}  // namespace

BENCHMARK_MAIN();
