// Physical parameters and shared domain types for the driven
// two-level-emitter + finite-bandwidth-detector system.
#pragma once

#include <compare>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace resfluor {

using Complex = std::complex<double>;

// Artifact version, recorded in every run manifest. Kept in sync with
// the CMake project version.
inline constexpr const char* kVersion = "0.1.0";

// Rates and drive amplitudes of the joint emitter+detector system.
// gamma_sigma sets the unit scale; every other rate is naturally read
// in units of gamma_sigma. Immutable value object: copy, don't mutate.
struct SystemParams {
    double omega_sigma = 1e-3;   // laser drive amplitude on the emitter
    double gamma_sigma = 1.0;    // emitter decay rate (unit scale)
    double Gamma = 0.2;          // detector linewidth
    double g = 1e-3;             // emitter->detector coupling
    double omega_a = 0.0;        // coherent drive on the detector mode
    double heitler_threshold = 1e-2;  // omega_sigma/gamma_sigma boundary

    // Weak-driving (coherent-scattering dominated) regime flag.
    bool heitler() const {
        return omega_sigma <= heitler_threshold * gamma_sigma;
    }

    // Same physics expressed in units of gamma_sigma (gamma_sigma = 1).
    SystemParams rescaled() const;
};

// Homodyne interference configuration: the attenuated-laser admixture
// knob f_prime plus the beam-splitter transmission/reflection pair.
// The master equation realizes the admixture by driving the detector
// with omega_a = g * omega_sigma * f_prime / gamma_sigma; t and r only
// enter intensity bookkeeping (splitter loss and the F <-> F' map).
struct HomodyneConfig {
    double f_prime = 0.0;  // dimensionless attenuation knob F'
    double t = 1.0;        // beam-splitter transmission, in (0, 1]
    double r = 0.0;        // beam-splitter reflection, in [0, 1)

    // F absorbs the splitter ratio back out of F'.
    double F() const { return f_prime * r / t; }

    // Coherent amplitude admixed with the emitter field.
    Complex beta(double omega_sigma, double gamma_sigma) const {
        return Complex(0.0, omega_sigma * f_prime / gamma_sigma);
    }

    // Convenience constructor enforcing r = sqrt(1 - t^2).
    static HomodyneConfig with_transmission(double f_prime, double t);
};

// Numerical knobs for approximating the analytic sensor limit
// (g -> 0, omega_sigma -> 0) at small finite values.
struct TruncationConfig {
    int n_max = 8;             // detector Fock-space cutoff
    double tol = 1e-9;         // convergence / truncation tolerance
    double g_eval = 1e-3;      // finite coupling standing in for g -> 0
    double omega_eval = 1e-3;  // finite drive standing in for omega -> 0
};

// Index (m, n, mu, nu) of the normally ordered moment
// < sigma^dag^m sigma^n a^dag^mu a^nu >, with m, n in {0, 1}.
struct MomentIndex {
    int m = 0;
    int n = 0;
    int mu = 0;
    int nu = 0;

    int order() const { return m + n + mu + nu; }
    bool valid() const {
        return (m == 0 || m == 1) && (n == 0 || n == 1) && mu >= 0 && nu >= 0;
    }
    // Index of the complex-conjugate moment.
    MomentIndex conjugate() const { return {n, m, nu, mu}; }

    auto operator<=>(const MomentIndex&) const = default;
};

// Report-style validation outcome: hard violations plus advisory hazards.
struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> hazards;

    bool ok() const { return violations.empty(); }
};

// Checks every type invariant and flags the homodyne divergence point
// (all compensated correlation functions diverge at f_prime = 2).
ValidationReport validate(const SystemParams& params, const HomodyneConfig& h,
                          const TruncationConfig& trunc);

// Returns params with omega_a derived from the homodyne knob:
// omega_a = g * omega_sigma * f_prime / gamma_sigma.
SystemParams resolve_drive(SystemParams params, const HomodyneConfig& h);

// Bundle read from a flat key=value config file. Recognized keys:
// omega_sigma, gamma_sigma, Gamma, g, omega_a, f_prime, t, n_max, tol.
// r is derived as sqrt(1 - t^2). Unknown keys are errors.
struct Config {
    SystemParams params;
    HomodyneConfig homodyne;
    TruncationConfig truncation;
};

Config load_config(std::istream& in);
Config load_config_file(const std::string& path);

}  // namespace resfluor
