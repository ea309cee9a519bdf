#include "resfluor/dynamics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "resfluor/analytic.hpp"
#include "resfluor/moments.hpp"

namespace resfluor {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_tau_grid(const std::vector<double>& grid) {
    if (grid.empty() || grid.front() != 0.0)
        throw std::invalid_argument("tau grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("tau grid must be strictly increasing");
}

// Regression matrix of the emitter on w = (<sigma>, <sigma^dag>,
// <sigma^dag sigma>), with the constant drive vector A so that
// dw/dt = M w + A.
Eigen::Matrix3cd tls_regression_matrix(double omega_sigma,
                                       double gamma_sigma) {
    const Complex I(0.0, 1.0);
    Eigen::Matrix3cd M;
    M << Complex(-0.5 * gamma_sigma, 0.0), Complex(0.0, 0.0),
        2.0 * I * omega_sigma, Complex(0.0, 0.0),
        Complex(-0.5 * gamma_sigma, 0.0), -2.0 * I * omega_sigma,
        I * omega_sigma, -I * omega_sigma, Complex(-gamma_sigma, 0.0);
    return M;
}

Eigen::Matrix2cd label_matrix(OperatorLabel l) {
    Eigen::Matrix2cd sm = Eigen::Matrix2cd::Zero();
    sm(0, 1) = 1.0;
    switch (l) {
        case OperatorLabel::identity:
            return Eigen::Matrix2cd::Identity();
        case OperatorLabel::sigma:
            return sm;
        case OperatorLabel::sigma_dagger:
            return sm.adjoint();
    }
    throw std::invalid_argument("unsupported operator label");
}

}  // namespace

MatrixExponential::MatrixExponential(Eigen::MatrixXcd A) : A_(std::move(A)) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A_);
    if (es.info() == Eigen::Success) {
        const Eigen::MatrixXcd V = es.eigenvectors();
        const Eigen::MatrixXcd Vinv =
            V.partialPivLu().solve(Eigen::MatrixXcd::Identity(
                A_.rows(), A_.cols()));
        const Eigen::MatrixXcd recon =
            V * es.eigenvalues().asDiagonal() * Vinv;
        if ((recon - A_).norm() <= 1e-11 * std::max(1.0, A_.norm())) {
            use_eig_ = true;
            evals_ = es.eigenvalues();
            V_ = V;
            Vinv_ = Vinv;
        }
    }
}

Eigen::VectorXcd MatrixExponential::apply(double tau,
                                          const Eigen::VectorXcd& v) const {
    if (use_eig_) {
        Eigen::VectorXcd y = Vinv_ * v;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y(i) *= std::exp(evals_(i) * tau);
        return V_ * y;
    }

    Eigen::MatrixXcd B = A_ * tau;
    int squarings = 0;
    double nrm = B.cwiseAbs().rowwise().sum().maxCoeff();
    while (nrm > 0.5 && squarings < 60) {
        nrm *= 0.5;
        ++squarings;
    }
    B *= std::ldexp(1.0, -squarings);
    Eigen::MatrixXcd E =
        Eigen::MatrixXcd::Identity(A_.rows(), A_.cols()) + B;
    Eigen::MatrixXcd term = B;
    for (int k = 2; k <= 18; ++k) {
        term = (term * B) / double(k);
        E += term;
    }
    for (int k = 0; k < squarings; ++k) E = E * E;
    return E * v;
}

std::vector<double> CorrelationSeries::g2_values() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const Complex& v : values) {
        if (std::abs(v.imag()) > 1e-8)
            throw std::runtime_error(label + ": imaginary residue " +
                                     std::to_string(v.imag()) +
                                     " exceeds 1e-8");
        if (v.real() < -1e-8)
            throw std::runtime_error(label + ": negative value " +
                                     std::to_string(v.real()) +
                                     " below -1e-8");
        out.push_back(std::max(0.0, v.real()));
    }
    return out;
}

double g2_tau_sigma_closed_form(double omega_sigma, double gamma_sigma,
                                double tau) {
    if (!(gamma_sigma > 0.0))
        throw std::invalid_argument("gamma_sigma must be positive");
    if (tau < 0.0) throw std::invalid_argument("tau must be non-negative");

    const Complex R = std::sqrt(Complex(
        gamma_sigma * gamma_sigma / 16.0 - 4.0 * omega_sigma * omega_sigma,
        0.0));
    const Complex z = R * tau;
    const Complex sinhc = std::abs(z) < 1e-8
                              ? Complex(1.0, 0.0) + z * z / 6.0
                              : std::sinh(z) / z;
    const Complex bracket =
        0.75 * gamma_sigma * tau * sinhc + std::cosh(z);
    return 1.0 - (bracket * std::exp(-0.75 * gamma_sigma * tau)).real();
}

OperatorLabel operator_label(const std::string& name) {
    if (name == "1") return OperatorLabel::identity;
    if (name == "sigma") return OperatorLabel::sigma;
    if (name == "sigma_dagger") return OperatorLabel::sigma_dagger;
    throw std::invalid_argument("unsupported operator label: " + name);
}

CorrelationSeries RegressionSolution::series(int component,
                                             double normalization,
                                             std::string label) const {
    if (component < 1 || component > 3)
        throw std::invalid_argument("component must be 1, 2, or 3");
    if (!(normalization != 0.0))
        throw std::invalid_argument("normalization must be nonzero");
    CorrelationSeries out;
    out.tau_grid = tau_grid;
    out.label = std::move(label);
    out.normalization = normalization;
    out.values.reserve(tau_grid.size());
    for (const Complex& v : components[component - 1])
        out.values.push_back(v / normalization);
    return out;
}

RegressionSolution two_time_correlator(OperatorLabel L, OperatorLabel R,
                                       const SystemParams& params,
                                       const std::vector<double>& tau_grid) {
    if (!(params.gamma_sigma > 0.0))
        throw std::invalid_argument("gamma_sigma must be positive");
    check_tau_grid(tau_grid);

    const TlsSteadyState ss =
        tls_steady_state(params.omega_sigma, params.gamma_sigma);
    Eigen::Matrix2cd rho;
    rho << Complex(1.0 - ss.n_sigma, 0.0), std::conj(ss.alpha), ss.alpha,
        Complex(ss.n_sigma, 0.0);

    const Eigen::Matrix2cd lm = label_matrix(L);
    const Eigen::Matrix2cd rm = label_matrix(R);
    const Eigen::Matrix2cd sm = label_matrix(OperatorLabel::sigma);
    const std::array<Eigen::Matrix2cd, 3> X = {sm, sm.adjoint(),
                                               sm.adjoint() * sm};

    Eigen::Vector3cd w0;
    for (int i = 0; i < 3; ++i) w0(i) = (rho * lm * X[i] * rm).trace();
    const Complex lr_mean = (rho * lm * rm).trace();
    const Eigen::Vector3cd w_ss(ss.alpha, std::conj(ss.alpha),
                                Complex(ss.n_sigma, 0.0));

    const MatrixExponential expm(
        tls_regression_matrix(params.omega_sigma, params.gamma_sigma));
    const Eigen::Vector3cd u = w0 - w_ss * lr_mean;

    RegressionSolution out;
    out.tau_grid = tau_grid;
    out.lr_mean = lr_mean;
    for (auto& c : out.components) c.reserve(tau_grid.size());
    for (const double tau : tau_grid) {
        const Eigen::VectorXcd w = expm.apply(tau, u) + w_ss * lr_mean;
        for (int i = 0; i < 3; ++i) out.components[i].push_back(w(i));
    }
    return out;
}

CorrelationSeries g2_tau_filtered(const SystemParams& params,
                                  const HomodyneConfig& h,
                                  const TruncationConfig& trunc,
                                  const std::vector<double>& tau_grid) {
    const ValidationReport report = validate(params, h, trunc);
    if (!report.ok())
        throw std::invalid_argument("invalid configuration: " +
                                    report.violations.front());
    check_tau_grid(tau_grid);

    const SystemParams p = resolve_drive(params, h);
    const MomentTable table = solve_recursive(p, 4);
    const double na = table.at({0, 0, 1, 1}).real();
    if (!(na > 0.0))
        throw std::runtime_error("detector population is not positive");

    // State: <a^dag O_idx(tau) a> for every index of order <= 2; the
    // regression generator closes on this set up to the same
    // photon-order-raising corrections the steady solve drops.
    std::map<MomentIndex, int> col;
    for (int m = 0; m <= 1; ++m)
        for (int n = 0; n <= 1; ++n)
            for (int mu = 0; m + n + mu <= 2; ++mu)
                for (int nu = 0; m + n + mu + nu <= 2; ++nu) {
                    const int next = static_cast<int>(col.size());
                    col.emplace(MomentIndex{m, n, mu, nu}, next);
                }
    const int dim = static_cast<int>(col.size());

    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd w0(dim);
    for (const auto& [idx, i] : col) {
        for (const auto& [target, coeff] : regression_coefficients(idx, p)) {
            const auto it = col.find(target);
            if (it != col.end()) G(i, it->second) += coeff;
        }
        w0(i) = table.at({idx.m, idx.n, idx.mu + 1, idx.nu + 1});
    }

    const MatrixExponential expm(G);
    const int out_row = col.at({0, 0, 1, 1});

    CorrelationSeries out;
    out.tau_grid = tau_grid;
    out.label = "g2_a";
    out.normalization = na * na;
    out.values.reserve(tau_grid.size());
    for (const double tau : tau_grid)
        out.values.push_back(expm.apply(tau, w0)(out_row) /
                             out.normalization);
    return out;
}

SpectrumCurve spectrum_numeric(const SystemParams& params,
                               std::optional<double> resolution,
                               const std::vector<double>& omega_grid) {
    if (!(params.gamma_sigma > 0.0))
        throw std::invalid_argument("gamma_sigma must be positive");
    if (omega_grid.empty())
        throw std::invalid_argument("omega grid must not be empty");
    for (std::size_t i = 1; i < omega_grid.size(); ++i)
        if (!(omega_grid[i] > omega_grid[i - 1]))
            throw std::invalid_argument(
                "omega grid must be strictly increasing");
    double damping = 0.0;
    if (resolution) {
        if (!(*resolution > 0.0))
            throw std::invalid_argument("resolution must be positive");
        damping = 0.5 * *resolution;
    }

    const double narrowest =
        resolution ? std::min(params.gamma_sigma, *resolution)
                   : params.gamma_sigma;
    for (std::size_t i = 1; i < omega_grid.size(); ++i) {
        const double mid = 0.5 * (omega_grid[i] + omega_grid[i - 1]);
        const double spacing = omega_grid[i] - omega_grid[i - 1];
        if (std::abs(mid) <= 5.0 * narrowest && spacing > 0.25 * narrowest)
            throw std::invalid_argument(
                "omega grid too coarse: spacing " + std::to_string(spacing) +
                " near resonance exceeds a quarter of the narrowest "
                "feature " + std::to_string(narrowest));
    }

    const TlsSteadyState ss =
        tls_steady_state(params.omega_sigma, params.gamma_sigma);
    if (!(ss.n_sigma > 0.0))
        throw std::runtime_error(
            "emitter population is zero; the spectrum is undefined");
    const double coherent_fraction = std::norm(ss.alpha) / ss.n_sigma;

    // <sigma^dag(0) sigma(tau)> = [exp(M tau) u]_1 + |alpha|^2 with
    // u from the quantum-regression initial conditions; its damped
    // half-Fourier transform is a resolvent evaluation per frequency.
    const Eigen::Matrix3cd M =
        tls_regression_matrix(params.omega_sigma, params.gamma_sigma);
    const Eigen::Vector3cd w_ss(ss.alpha, std::conj(ss.alpha),
                                Complex(ss.n_sigma, 0.0));
    Eigen::Vector3cd w0(Complex(ss.n_sigma, 0.0), Complex(0.0, 0.0),
                        Complex(0.0, 0.0));
    const Eigen::Vector3cd u = w0 - w_ss * std::conj(ss.alpha);

    SpectrumCurve out;
    out.omega_grid = omega_grid;
    out.density.reserve(omega_grid.size());
    out.delta_weight = resolution ? 0.0 : coherent_fraction;
    out.delta_location = 0.0;

    const Eigen::Matrix3cd id = Eigen::Matrix3cd::Identity();
    for (const double omega : omega_grid) {
        const Eigen::Matrix3cd shifted =
            M + (Complex(0.0, omega) - damping) * id;
        const Eigen::Vector3cd x = shifted.partialPivLu().solve(
            (-u).eval());
        double density = x(0).real();
        if (resolution)
            density += std::norm(ss.alpha) * damping /
                       (damping * damping + omega * omega);
        density /= kPi * ss.n_sigma;
        out.density.push_back(std::max(0.0, density));
    }
    return out;
}

double plateau_width(const CorrelationSeries& series, double threshold) {
    if (series.tau_grid.empty())
        throw std::invalid_argument("series is empty");
    const std::vector<double> vals = series.g2_values();
    if (vals.front() > threshold) return 0.0;
    for (std::size_t j = 1; j < vals.size(); ++j)
        if (vals[j] > threshold) return series.tau_grid[j - 1];
    return series.tau_grid.back();
}

}  // namespace resfluor
