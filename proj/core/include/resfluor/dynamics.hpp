// Two-time correlators via the quantum regression theorem, delayed
// second-order correlations of the filtered and homodyne-corrected
// detection, emission spectra, and plateau measurement.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "resfluor/model.hpp"

namespace resfluor {

// Delayed correlator samples on a tau grid (units of 1/gamma_sigma).
// The grid starts at 0 and is strictly increasing. Negative delays
// follow from stationarity, g2(-tau) = g2(tau), and are not stored.
struct CorrelationSeries {
    std::vector<double> tau_grid;
    std::vector<Complex> values;
    std::string label;
    double normalization = 1.0;

    // Values as reals, for second-order-correlation series: enforces
    // an imaginary residue within 1e-8 and values >= -1e-8, clamping
    // the residues away.
    std::vector<double> g2_values() const;
};

// One-sided emission spectrum. The coherent delta is carried as a
// (weight, location) pair and is never binned onto the grid; when a
// detector resolution is applied the delta's weight moves into the
// density as a Lorentzian of that width and delta_weight drops to 0.
struct SpectrumCurve {
    std::vector<double> omega_grid;
    std::vector<double> density;
    double delta_weight = 0.0;
    double delta_location = 0.0;
};

// exp(A tau) action by eigendecomposition, with a scaled Taylor
// squaring fallback when A is defective.
class MatrixExponential {
  public:
    explicit MatrixExponential(Eigen::MatrixXcd A);
    Eigen::VectorXcd apply(double tau, const Eigen::VectorXcd& v) const;
    bool used_eigendecomposition() const { return use_eig_; }

  private:
    Eigen::MatrixXcd A_;
    bool use_eig_ = false;
    Eigen::VectorXcd evals_;
    Eigen::MatrixXcd V_;
    Eigen::MatrixXcd Vinv_;
};

// Perfect-time-resolution second-order correlation of resonance
// fluorescence, 1 - [3 gamma/(4R) sinh(R tau) + cosh(R tau)]
// exp(-3 gamma tau / 4) with R = sqrt((gamma/4)^2 - (2 omega)^2);
// imaginary R continues into sin/cos and brings oscillations, which
// happens exactly when omega_sigma > gamma_sigma / 8.
double g2_tau_sigma_closed_form(double omega_sigma, double gamma_sigma,
                                double tau);

enum class OperatorLabel { identity, sigma, sigma_dagger };

// Parses "1", "sigma", or "sigma_dagger"; anything else is an error.
OperatorLabel operator_label(const std::string& name);

// Solution of the emitter regression equations for <L X(tau) R> with
// X running over the closed set {sigma, sigma_dagger,
// sigma_dagger * sigma} (components 1, 2, 3).
struct RegressionSolution {
    std::vector<double> tau_grid;
    std::array<std::vector<Complex>, 3> components;
    Complex lr_mean;  // <L R> in the steady state

    // One component as a labeled series divided by normalization.
    CorrelationSeries series(int component, double normalization,
                             std::string label) const;
};

// Exact two-time emitter correlators: propagates the regression
// matrix from the steady-state initial conditions <L X R>. At tau = 0
// the components reproduce single-time steady moments.
RegressionSolution two_time_correlator(OperatorLabel L, OperatorLabel R,
                                       const SystemParams& params,
                                       const std::vector<double>& tau_grid);

// Delayed second-order correlation of the detected field,
// <a^dag (a^dag a)(tau) a> / <a^dag a>^2, from the joint moment
// equations propagated under quantum-regression initial conditions.
// f_prime = 0 is the plain filtered emission; f_prime at the lower
// compensation value gives the corrected source.
CorrelationSeries g2_tau_filtered(const SystemParams& params,
                                  const HomodyneConfig& h,
                                  const TruncationConfig& trunc,
                                  const std::vector<double>& tau_grid);

// Emission spectrum from the half-Fourier transform of
// <sigma^dag(0) sigma(tau)>, evaluated analytically through the
// resolvent of the regression matrix (no FFT, no windowing). With a
// resolution, every term is damped by exp(-resolution tau / 2),
// turning the coherent delta into a Lorentzian of that full width.
// Errors if the grid undersamples the narrowest spectral feature.
SpectrumCurve spectrum_numeric(const SystemParams& params,
                               std::optional<double> resolution,
                               const std::vector<double>& omega_grid);

// Largest tau* such that the series stays at or below threshold for
// all tau <= tau*: 0 if the first point exceeds it, the last grid
// point if none does.
double plateau_width(const CorrelationSeries& series, double threshold);

}  // namespace resfluor
