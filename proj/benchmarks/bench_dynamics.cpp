// Microbenchmarks for two-time correlations and the emission spectrum.
#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "resfluor/dynamics.hpp"
#include "resfluor/model.hpp"

namespace {

std::vector<double> linear_grid(double start, double end, int points) {
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = start + (end - start) * i / (points - 1);
    return grid;
}

void BM_TwoTimeCorrelator(benchmark::State& state) {
    resfluor::SystemParams params;
    params.omega_sigma = 0.3;
    const auto grid = linear_grid(0.0, 20.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto sol = resfluor::two_time_correlator(
            resfluor::OperatorLabel::sigma_dagger, resfluor::OperatorLabel::sigma,
            params, grid);
        benchmark::DoNotOptimize(sol.components);
    }
}
BENCHMARK(BM_TwoTimeCorrelator)->Arg(101)->Arg(1001);

void BM_G2TauFiltered(benchmark::State& state) {
    resfluor::SystemParams params;
    params.omega_sigma = 1e-3;
    params.g = 1e-3;
    params.Gamma = 0.2;
    const resfluor::HomodyneConfig h;
    const resfluor::TruncationConfig trunc;
    const auto grid = linear_grid(0.0, 40.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto series = resfluor::g2_tau_filtered(params, h, trunc, grid);
        benchmark::DoNotOptimize(series.values);
    }
}
BENCHMARK(BM_G2TauFiltered)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_SpectrumNumeric(benchmark::State& state) {
    resfluor::SystemParams params;
    params.omega_sigma = 1e-3;
    const auto grid = linear_grid(-2.0, 2.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto curve = resfluor::spectrum_numeric(params, std::nullopt, grid);
        benchmark::DoNotOptimize(curve.density);
    }
}
BENCHMARK(BM_SpectrumNumeric)->Arg(601)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
