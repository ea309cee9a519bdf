// Quantum-jump Monte Carlo unraveling of the joint master equation:
// detector click trains, waiting-time statistics, and a coincidence
// estimator for the zero-delay second-order correlation.
#pragma once

#include <cstdint>
#include <vector>

#include "resfluor/model.hpp"

namespace resfluor {

// Detector-channel jump times from one trajectory. Emitter-channel
// jumps are simulated but not recorded. max_survival_mismatch is a
// diagnostic: the largest gap between the drawn survival target and
// the norm decay at an accepted jump time.
struct ClickTrain {
    std::vector<double> times;
    double duration = 0.0;
    SystemParams params;
    std::uint64_t seed = 0;
    double max_survival_mismatch = 0.0;
};

// Empirical cumulative distribution of consecutive click gaps on the
// normalized axis x = I * delta_tau, with I the empirical click rate.
struct WaitingTimeCDF {
    std::vector<double> x_grid;
    std::vector<double> cdf;
    std::int64_t n_pairs = 0;
    double rate_i = 0.0;
};

struct G2ZeroEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    std::int64_t pairs = 0;
    double window = 0.0;
};

// Standard quantum-jump evolution of the joint emitter+detector pure
// state with channels sqrt(gamma_sigma) sigma and sqrt(Gamma) a; jump
// times located by bisection on the survival probability under the
// exact non-Hermitian propagator. Deterministic for a fixed seed.
// Requires a diagonalizable effective Hamiltonian.
ClickTrain simulate_clicks(const SystemParams& params,
                           const HomodyneConfig& h,
                           const TruncationConfig& trunc, double duration,
                           std::uint64_t seed);

// Homogeneous Poisson reference train at the given rate.
ClickTrain poisson_train(double rate, double duration, std::uint64_t seed);

// Consecutive-gap CDF. The pooled overload takes gaps within each
// train and never across trains; the rate is total clicks over total
// duration. Errors with fewer than 2 total clicks; warns on stderr
// below 1e4 clicks.
WaitingTimeCDF waiting_time_cdf(const ClickTrain& train);
WaitingTimeCDF waiting_time_cdf(const std::vector<ClickTrain>& trains);

// Coincidence estimate of the zero-delay second-order correlation:
// ordered click pairs closer than window, normalized by N * I *
// window, with a Poisson standard error. The window must be small
// against the mean gap 1/I; a warning is printed past a tenth of it.
G2ZeroEstimate g2_zero_from_clicks(const ClickTrain& train, double window);

}  // namespace resfluor
