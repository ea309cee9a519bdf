#include "resfluor/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace resfluor {

namespace {

double binomial(int n, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out *= double(n - k + i) / double(i);
    return out;
}

// Signed bracket of the Nth-order homodyne correction, the quantity
// whose square multiplies the filtered correlation. Zeros of the
// correlation are simple sign changes here, which keeps root finding
// robust where the squared form only touches zero.
double homodyne_bracket(int N, double gamma_sigma, double Gamma,
                        double f_prime) {
    double sum = 0.0;
    for (int k = 0; k <= N; ++k) {
        double term = binomial(N, k) * std::pow(2.0, k) *
                      std::pow(-f_prime, N - k);
        for (int lam = 1; lam <= N - k; ++lam)
            term *= 1.0 + (N - lam) * Gamma / gamma_sigma;
        sum += term;
    }
    return sum;
}

// Zero of the order-N signed bracket in f_prime adjacent to the
// divergence point 2: below it for the lower branch, above it for the
// upper branch. Exact for N = 2, scanned plus bisected otherwise.
double f_prime_zero(int N, double gamma_sigma, double Gamma, bool upper) {
    if (N == 2) {
        const CompensationPair pair =
            compensation_condition(gamma_sigma, Gamma);
        return upper ? pair.f_plus : pair.f_minus;
    }

    const int kScan = 4096;
    const double start = upper ? 2.0 + 1e-9 : 2.0 - 1e-9;
    const double stop = upper ? 4.0 : 0.0;
    double a = start;
    double fa = homodyne_bracket(N, gamma_sigma, Gamma, a);
    for (int i = 1; i <= kScan; ++i) {
        const double b = start + (stop - start) * double(i) / kScan;
        const double fb = homodyne_bracket(N, gamma_sigma, Gamma, b);
        if (fb == 0.0) return b;
        if (std::signbit(fb) != std::signbit(fa)) {
            double lo = std::min(a, b), up = std::max(a, b);
            double flo = homodyne_bracket(N, gamma_sigma, Gamma, lo);
            for (int it = 0; it < 200 && (up - lo) > 1e-15; ++it) {
                const double mid = 0.5 * (lo + up);
                const double fm =
                    homodyne_bracket(N, gamma_sigma, Gamma, mid);
                if (fm == 0.0) return mid;
                if (std::signbit(fm) == std::signbit(flo)) {
                    lo = mid;
                    flo = fm;
                } else {
                    up = mid;
                }
            }
            return 0.5 * (lo + up);
        }
        a = b;
        fa = fb;
    }
    throw std::runtime_error("no compensation zero adjacent to f_prime = 2 "
                             "for order " + std::to_string(N));
}

}  // namespace

TlsSteadyState tls_steady_state(double omega_sigma, double gamma_sigma) {
    if (!(gamma_sigma > 0.0))
        throw std::invalid_argument("gamma_sigma must be positive");
    const double denom =
        gamma_sigma * gamma_sigma + 8.0 * omega_sigma * omega_sigma;
    return {Complex(0.0, -2.0 * omega_sigma * gamma_sigma / denom),
            4.0 * omega_sigma * omega_sigma / denom};
}

double gN_filtered(int N, double gamma_sigma, double Gamma) {
    if (N < 2) throw std::invalid_argument("correlation order must be >= 2");
    if (!(gamma_sigma > 0.0))
        throw std::invalid_argument("gamma_sigma must be positive");
    if (Gamma < 0.0) throw std::invalid_argument("Gamma must be non-negative");
    double out = 1.0;
    for (int k = 1; k < N; ++k) {
        const double factor = gamma_sigma / (gamma_sigma + k * Gamma);
        out *= factor * factor;
    }
    return out;
}

double g2_homodyne(double gamma_sigma, double Gamma, double f_prime) {
    if (f_prime == 2.0)
        throw std::domain_error(
            "homodyne correlation diverges at f_prime = 2");
    const double total = gamma_sigma + Gamma;
    const double num = 4.0 * gamma_sigma - (4.0 - f_prime) * f_prime * total;
    const double den = (2.0 - f_prime) * (2.0 - f_prime) * total;
    const double ratio = num / den;
    return ratio * ratio;
}

double gN_homodyne(int N, double gamma_sigma, double Gamma, double f_prime) {
    if (f_prime == 2.0)
        throw std::domain_error(
            "homodyne correlation diverges at f_prime = 2");
    const double bracket = homodyne_bracket(N, gamma_sigma, Gamma, f_prime) /
                           std::pow(2.0 - f_prime, N);
    return gN_filtered(N, gamma_sigma, Gamma) * bracket * bracket;
}

CompensationPair compensation_condition(double gamma_sigma, double Gamma) {
    if (!(gamma_sigma > 0.0))
        throw std::invalid_argument("gamma_sigma must be positive");
    if (Gamma < 0.0) throw std::invalid_argument("Gamma must be non-negative");
    const double s = std::sqrt(Gamma / (Gamma + gamma_sigma));
    return {2.0 * (1.0 - s), 2.0 * (1.0 + s)};
}

std::vector<double> joint_zero_filter(int N, int N_prime,
                                      double gamma_sigma) {
    if (N < 2) throw std::invalid_argument("N must be at least 2");
    if (!(gamma_sigma > 0.0))
        throw std::invalid_argument("gamma_sigma must be positive");
    if (N_prime <= N + 1) return {};

    std::vector<double> roots;
    // The compensation point of order N has a lower and an upper
    // branch; joint zeros of the higher order occur on either.
    for (const bool upper : {false, true}) {
        auto signed_value = [&](double Gamma) {
            return homodyne_bracket(
                N_prime, gamma_sigma, Gamma,
                f_prime_zero(N, gamma_sigma, Gamma, upper));
        };

        const double lo = 1e-4 * gamma_sigma;
        const double hi = 10.0 * gamma_sigma;
        const int kPoints = 1200;
        double xa = lo;
        double fa = signed_value(xa);
        for (int i = 1; i <= kPoints; ++i) {
            const double xb = lo * std::pow(hi / lo, double(i) / kPoints);
            const double fb = signed_value(xb);
            if (fb == 0.0) {
                roots.push_back(xb);
            } else if (fa != 0.0 && std::signbit(fb) != std::signbit(fa)) {
                double a = xa, b = xb, va = fa;
                for (int it = 0;
                     it < 200 && (b - a) > 1e-12 * 0.5 * (a + b); ++it) {
                    const double mid = 0.5 * (a + b);
                    const double vm = signed_value(mid);
                    if (vm == 0.0) {
                        a = b = mid;
                        break;
                    }
                    if (std::signbit(vm) == std::signbit(va)) {
                        a = mid;
                        va = vm;
                    } else {
                        b = mid;
                    }
                }
                roots.push_back(0.5 * (a + b));
            }
            xa = xb;
            fa = fb;
        }
    }
    if (roots.empty())
        throw std::runtime_error(
            "no joint zero of orders " + std::to_string(N) + " and " +
            std::to_string(N_prime) + " in (0, 10 gamma_sigma]");
    std::sort(roots.begin(), roots.end());
    return roots;
}

FieldMoments sigma_field_moments(double omega_sigma, double gamma_sigma) {
    const TlsSteadyState ss = tls_steady_state(omega_sigma, gamma_sigma);
    FieldMoments f;
    f.mean = ss.alpha;
    f.square = Complex(0.0, 0.0);
    f.population = ss.n_sigma;
    f.triple = Complex(0.0, 0.0);
    f.fourth = 0.0;
    return f;
}

FieldMoments detector_field_moments(const MomentTable& table) {
    FieldMoments f;
    f.mean = table.at({0, 0, 0, 1});
    f.square = table.at({0, 0, 0, 2});
    f.population = table.at({0, 0, 1, 1}).real();
    f.triple = table.at({0, 0, 1, 2});
    f.fourth = table.at({0, 0, 2, 2}).real();
    return f;
}

Decomposition decompose_g2(const FieldMoments& f) {
    if (!(f.population > 0.0))
        throw std::invalid_argument("field population must be positive");

    const Complex alpha = f.mean;
    const double a2 = std::norm(alpha);
    const Complex d_sq = f.square - alpha * alpha;
    const double d_pop = f.population - a2;
    const Complex d_triple = f.triple - a2 * alpha -
                             std::conj(alpha) * d_sq - 2.0 * alpha * d_pop;
    const double d_fourth =
        f.fourth - a2 * a2 -
        (std::conj(alpha) * std::conj(alpha) * d_sq).real() -
        (alpha * alpha * std::conj(d_sq)).real() - 4.0 * a2 * d_pop -
        2.0 * (std::conj(alpha) * d_triple).real() -
        2.0 * (alpha * std::conj(d_triple)).real();

    const double n2 = f.population * f.population;
    Decomposition out;
    out.base = 1.0;
    out.i0 = (d_fourth - d_pop * d_pop) / n2;
    out.i1 = 4.0 * (std::conj(alpha) * d_triple).real() / n2;
    out.i2 = 2.0 * (a2 * d_pop + (std::conj(alpha) * std::conj(alpha) * d_sq).real()) / n2;
    return out;
}

HeitlerSpectrumPoint spectrum_heitler(double omega, double omega_sigma,
                                      double gamma_sigma) {
    if (!(gamma_sigma > 0.0))
        throw std::invalid_argument("gamma_sigma must be positive");
    const double k2 =
        8.0 * omega_sigma * omega_sigma / (gamma_sigma * gamma_sigma);
    if (k2 > 1.0)
        throw std::domain_error(
            "incoherent weight k2 = " + std::to_string(k2) +
            " exceeds 1; drive is outside the weak-drive regime");
    const double half = 0.5 * gamma_sigma;
    const double pi = 3.14159265358979323846;
    return {1.0 - k2, k2 * half / pi / (half * half + omega * omega)};
}

EmissionRates emission_rates(const SystemParams& params,
                             const HomodyneConfig& h) {
    if (!(params.gamma_sigma > 0.0))
        throw std::invalid_argument("gamma_sigma must be positive");
    EmissionRates out;
    out.i_rf = 4.0 * params.omega_sigma * params.omega_sigma /
               params.gamma_sigma;
    const double suppression = 1.0 - 0.5 * h.f_prime;
    out.ratio = h.t * h.t * suppression * suppression;
    out.i_interfering = out.ratio * out.i_rf;
    return out;
}

}  // namespace resfluor
