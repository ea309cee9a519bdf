// Microbenchmarks for the quantum-jump click-train generator and the
// click-train statistics.
#include <benchmark/benchmark.h>

#include <cstdint>

#include "resfluor/model.hpp"
#include "resfluor/trajectories.hpp"

namespace {

resfluor::SystemParams mc_params() {
    resfluor::SystemParams p;
    p.omega_sigma = 0.05;
    p.gamma_sigma = 1.0;
    p.Gamma = 0.2;
    p.g = 0.1;
    return p;
}

void BM_SimulateClicks(benchmark::State& state) {
    const auto params = mc_params();
    const resfluor::HomodyneConfig h;
    resfluor::TruncationConfig trunc;
    trunc.n_max = 6;
    const double duration = static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto train = resfluor::simulate_clicks(params, h, trunc, duration, 1);
        benchmark::DoNotOptimize(train.times);
    }
}
BENCHMARK(BM_SimulateClicks)->Arg(200)->Arg(2000)
    ->Unit(benchmark::kMillisecond);

void BM_WaitingTimeCDF(benchmark::State& state) {
    const auto train = resfluor::poisson_train(2.0, 5e4, 7);
    for (auto _ : state) {
        auto stats = resfluor::waiting_time_cdf(train);
        benchmark::DoNotOptimize(stats.cdf);
    }
}
BENCHMARK(BM_WaitingTimeCDF)->Unit(benchmark::kMillisecond);

void BM_G2ZeroFromClicks(benchmark::State& state) {
    const auto train = resfluor::poisson_train(2.0, 5e4, 7);
    for (auto _ : state) {
        auto estimate = resfluor::g2_zero_from_clicks(train, 0.05);
        benchmark::DoNotOptimize(estimate.value);
    }
}
BENCHMARK(BM_G2ZeroFromClicks)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
