#include "resfluor/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace resfluor {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

// Exact no-jump propagator exp(-i H_eff t) through one
// eigendecomposition, organized so that a jump segment pays one
// basis transform and each candidate time only a single matvec.
class SegmentPropagator {
  public:
    explicit SegmentPropagator(const Eigen::MatrixXcd& h_eff) {
        const Eigen::MatrixXcd K = Complex(0.0, -1.0) * h_eff;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(K);
        if (es.info() != Eigen::Success)
            throw std::runtime_error(
                "effective Hamiltonian eigendecomposition failed");
        V_ = es.eigenvectors();
        evals_ = es.eigenvalues();
        Vinv_ = V_.partialPivLu().solve(
            Eigen::MatrixXcd::Identity(K.rows(), K.cols()));
        const double err =
            (V_ * evals_.asDiagonal() * Vinv_ - K).norm();
        if (err > 1e-10 * std::max(1.0, K.norm()))
            throw std::runtime_error(
                "effective Hamiltonian is defective; jump evolution "
                "needs a diagonalizable generator");
    }

    void start_segment(const Eigen::VectorXcd& psi) { y_ = Vinv_ * psi; }

    Eigen::VectorXcd at(double dt) const {
        Eigen::VectorXcd z = y_;
        for (Eigen::Index i = 0; i < z.size(); ++i)
            z(i) *= std::exp(evals_(i) * dt);
        return V_ * z;
    }

    double survival(double dt) const { return at(dt).squaredNorm(); }

  private:
    Eigen::MatrixXcd V_;
    Eigen::MatrixXcd Vinv_;
    Eigen::VectorXcd evals_;
    Eigen::VectorXcd y_;
};

struct JointMatrices {
    Eigen::MatrixXcd sigma;
    Eigen::MatrixXcd a;
    Eigen::MatrixXcd h_eff;
};

JointMatrices make_joint(const SystemParams& p, int n_max) {
    const int nf = n_max + 1;
    const int dim = 2 * nf;
    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int level = 0; level < 2; ++level)
        for (int ph = 0; ph < nf; ++ph) {
            const int i = level * nf + ph;
            if (level == 1) sigma(0 * nf + ph, i) = 1.0;
            if (ph > 0) a(level * nf + ph - 1, i) = std::sqrt(double(ph));
        }
    const Eigen::MatrixXcd H =
        p.omega_sigma * (sigma + sigma.adjoint()) +
        p.g * (sigma * a.adjoint() + sigma.adjoint() * a) +
        Complex(0.0, 1.0) * p.omega_a * (a.adjoint() - a);
    const Eigen::MatrixXcd h_eff =
        H -
        Complex(0.0, 0.5 * p.gamma_sigma) * (sigma.adjoint() * sigma) -
        Complex(0.0, 0.5 * p.Gamma) * (a.adjoint() * a);
    return {sigma, a, h_eff};
}

}  // namespace

ClickTrain simulate_clicks(const SystemParams& params,
                           const HomodyneConfig& h,
                           const TruncationConfig& trunc, double duration,
                           std::uint64_t seed) {
    const ValidationReport report = validate(params, h, trunc);
    if (!report.ok())
        throw std::invalid_argument("invalid configuration: " +
                                    report.violations.front());
    if (!(duration > 0.0))
        throw std::invalid_argument("duration must be positive");

    const SystemParams p = resolve_drive(params, h);

    ClickTrain train;
    train.duration = duration;
    train.params = p;
    train.seed = seed;
    if (p.omega_sigma == 0.0) return train;

    const int nf = trunc.n_max + 1;
    const int dim = 2 * nf;
    const JointMatrices joint = make_joint(p, trunc.n_max);
    SegmentPropagator prop(joint.h_eff);

    std::mt19937_64 rng = make_rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    auto draw_open = [&]() {
        double u;
        do {
            u = uniform(rng);
        } while (u <= 0.0 || u >= 1.0);
        return u;
    };

    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi(0) = 1.0;
    double t = 0.0;
    const double rate_guess =
        p.gamma_sigma * 4.0 * p.omega_sigma * p.omega_sigma /
        (p.gamma_sigma * p.gamma_sigma +
         8.0 * p.omega_sigma * p.omega_sigma);

    while (t < duration) {
        const double target = draw_open();
        prop.start_segment(psi);
        const double remaining = duration - t;
        if (prop.survival(remaining) > target) break;

        double lo = 0.0;
        double hi = std::min(remaining, 1.0 / std::max(rate_guess, 1e-300));
        while (prop.survival(hi) > target && hi < remaining) {
            lo = hi;
            hi = std::min(2.0 * hi, remaining);
        }
        double s_mid = 0.0;
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            mid = 0.5 * (lo + hi);
            s_mid = prop.survival(mid);
            const bool time_ok = (hi - lo) <= 1e-8 * std::max(mid, 1e-300);
            const bool prob_ok = std::abs(s_mid - target) <= 1e-8 * target;
            if (time_ok && prob_ok) break;
            if (s_mid > target)
                lo = mid;
            else
                hi = mid;
        }
        train.max_survival_mismatch = std::max(
            train.max_survival_mismatch, std::abs(s_mid - target));

        t += mid;
        const Eigen::VectorXcd psi_pre = prop.at(mid);
        const Eigen::VectorXcd psi_sigma = joint.sigma * psi_pre;
        const Eigen::VectorXcd psi_a = joint.a * psi_pre;
        const double p_sigma = p.gamma_sigma * psi_sigma.squaredNorm();
        const double p_a = p.Gamma * psi_a.squaredNorm();
        if (!(p_sigma + p_a > 0.0))
            throw std::runtime_error(
                "zero jump rate at a located jump time");

        if (uniform(rng) * (p_sigma + p_a) < p_sigma) {
            psi = psi_sigma / psi_sigma.norm();
        } else {
            train.times.push_back(t);
            psi = psi_a / psi_a.norm();
        }

        double top = 0.0;
        for (int level = 0; level < 2; ++level)
            top += std::norm(psi(level * nf + trunc.n_max));
        if (top > 1e-3)
            throw std::runtime_error(
                "detector truncation overflow during trajectory: top "
                "Fock level holds " + std::to_string(top) +
                " of the state; increase n_max");
    }
    return train;
}

ClickTrain poisson_train(double rate, double duration, std::uint64_t seed) {
    if (!(rate > 0.0)) throw std::invalid_argument("rate must be positive");
    if (!(duration > 0.0))
        throw std::invalid_argument("duration must be positive");
    ClickTrain train;
    train.duration = duration;
    train.seed = seed;
    std::mt19937_64 rng = make_rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double t = 0.0;
    for (;;) {
        double u;
        do {
            u = uniform(rng);
        } while (u <= 0.0 || u >= 1.0);
        t += -std::log(u) / rate;
        if (t > duration) break;
        train.times.push_back(t);
    }
    return train;
}

WaitingTimeCDF waiting_time_cdf(const std::vector<ClickTrain>& trains) {
    std::size_t clicks = 0;
    double total_duration = 0.0;
    for (const ClickTrain& train : trains) {
        clicks += train.times.size();
        total_duration += train.duration;
    }
    if (clicks < 2)
        throw std::runtime_error(
            "waiting-time statistics need at least 2 clicks, got " +
            std::to_string(clicks));
    if (clicks < 10000)
        std::cerr << "warning: waiting-time CDF built from only " << clicks
                  << " clicks; statistics will be noisy\n";
    if (!(total_duration > 0.0))
        throw std::runtime_error("total duration must be positive");

    const double rate = double(clicks) / total_duration;
    std::vector<double> gaps;
    gaps.reserve(clicks);
    for (const ClickTrain& train : trains)
        for (std::size_t i = 1; i < train.times.size(); ++i)
            gaps.push_back(rate * (train.times[i] - train.times[i - 1]));
    if (gaps.empty())
        throw std::runtime_error(
            "waiting-time statistics need at least one same-train gap");
    std::sort(gaps.begin(), gaps.end());

    WaitingTimeCDF out;
    out.n_pairs = static_cast<std::int64_t>(gaps.size());
    out.rate_i = rate;
    const double x_lo = 1e-3;
    const double x_hi = std::max(1e3, 1.05 * gaps.back());
    const int points = 200;
    out.x_grid.reserve(points);
    out.cdf.reserve(points);
    for (int i = 0; i < points; ++i) {
        const double x =
            x_lo * std::pow(x_hi / x_lo, double(i) / (points - 1));
        const auto it = std::upper_bound(gaps.begin(), gaps.end(), x);
        out.x_grid.push_back(x);
        out.cdf.push_back(double(it - gaps.begin()) / double(gaps.size()));
    }
    return out;
}

WaitingTimeCDF waiting_time_cdf(const ClickTrain& train) {
    return waiting_time_cdf(std::vector<ClickTrain>{train});
}

G2ZeroEstimate g2_zero_from_clicks(const ClickTrain& train, double window) {
    if (train.times.empty())
        throw std::runtime_error("empty click train");
    if (!(window > 0.0))
        throw std::invalid_argument("window must be positive");
    if (!(train.duration > 0.0))
        throw std::invalid_argument("train duration must be positive");

    const double rate = double(train.times.size()) / train.duration;
    if (window * rate > 0.1)
        std::cerr << "warning: coincidence window " << window
                  << " is not small against the mean gap "
                  << 1.0 / rate << "\n";

    std::int64_t pairs = 0;
    std::size_t lo = 0;
    for (std::size_t j = 1; j < train.times.size(); ++j) {
        while (train.times[j] - train.times[lo] > window) ++lo;
        pairs += static_cast<std::int64_t>(j - lo);
    }

    const double norm =
        double(train.times.size()) * rate * window;
    G2ZeroEstimate out;
    out.pairs = pairs;
    out.window = window;
    out.value = double(pairs) / norm;
    out.standard_error = std::sqrt(double(pairs) + 1.0) / norm;
    return out;
}

}  // namespace resfluor
