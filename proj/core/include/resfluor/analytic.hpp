// Closed-form results for the driven two-level system seen through a
// finite-bandwidth detector: steady-state fields, filtered and
// homodyne-corrected correlation functions, compensation conditions,
// the second-order correlation decomposition, the weak-drive spectrum,
// and emission rates.
#pragma once

#include <vector>

#include "resfluor/model.hpp"
#include "resfluor/moments.hpp"

namespace resfluor {

struct TlsSteadyState {
    Complex alpha;
    double n_sigma = 0.0;
};

// Steady state of the resonantly driven emitter: coherent amplitude
// alpha = -2 i omega gamma / (gamma^2 + 8 omega^2) and population
// n_sigma = 4 omega^2 / (gamma^2 + 8 omega^2).
TlsSteadyState tls_steady_state(double omega_sigma, double gamma_sigma);

// Zero-delay Nth-order correlation of the filtered emission,
// prod_{k=1}^{N-1} gamma^2 / (gamma + k Gamma)^2. Requires N >= 2.
double gN_filtered(int N, double gamma_sigma, double Gamma);

// Second-order correlation of the homodyne-corrected detection with
// laser admixture f_prime. Diverges at f_prime = 2.
double g2_homodyne(double gamma_sigma, double Gamma, double f_prime);

// Nth-order generalization; reduces to g2_homodyne at N = 2.
double gN_homodyne(int N, double gamma_sigma, double Gamma, double f_prime);

// The two admixtures that null the second-order correlation for a
// given detector linewidth. f_minus + f_plus = 4 exactly.
struct CompensationPair {
    double f_minus = 0.0;
    double f_plus = 0.0;
};
CompensationPair compensation_condition(double gamma_sigma, double Gamma);

// Detector linewidths at which order N and order N_prime correlations
// vanish simultaneously when f_prime sits at the lower order-N zero.
// Returns the roots in (0, 10 gamma_sigma], empty if N_prime <= N + 1.
std::vector<double> joint_zero_filter(int N, int N_prime,
                                      double gamma_sigma = 1.0);

// Normally ordered moments of a single field mode c, enough to build
// the correlation decomposition: mean <c>, square <c^2>, population
// <c^dag c>, triple <c^dag c^2>, fourth <c^dag^2 c^2>.
struct FieldMoments {
    Complex mean;
    Complex square;
    double population = 0.0;
    Complex triple;
    double fourth = 0.0;
};

FieldMoments sigma_field_moments(double omega_sigma, double gamma_sigma);
FieldMoments detector_field_moments(const MomentTable& table);

// Additive split g2 = 1 + i0 + i1 + i2 around the mean field: i0 is
// the normally ordered fluctuation variance, i1 the anomalous-moment
// cross term, i2 the quadrature (squeezing) term.
struct Decomposition {
    double base = 1.0;
    double i0 = 0.0;
    double i1 = 0.0;
    double i2 = 0.0;

    double g2() const { return base + i0 + i1 + i2; }
};
Decomposition decompose_g2(const FieldMoments& f);

// Weak-drive emission spectrum: a coherent delta of weight 1 - k2 at
// the drive frequency plus a Lorentzian of integral k2 and full width
// gamma_sigma, k2 = 8 omega^2 / gamma^2. The delta weight is carried
// separately, never binned onto a frequency grid.
struct HeitlerSpectrumPoint {
    double delta_weight = 0.0;
    double density = 0.0;
};
HeitlerSpectrumPoint spectrum_heitler(double omega, double omega_sigma,
                                      double gamma_sigma);

// Weak-drive emission rates: bare fluorescence rate i_rf, the rate
// i_interfering after beam-splitter admixture, and their ratio
// t^2 (1 - f_prime/2)^2. At the lower compensation point the ratio
// equals t^2 Gamma / (Gamma + gamma_sigma).
struct EmissionRates {
    double i_rf = 0.0;
    double i_interfering = 0.0;
    double ratio = 0.0;
};
EmissionRates emission_rates(const SystemParams& params,
                             const HomodyneConfig& h);

}  // namespace resfluor
