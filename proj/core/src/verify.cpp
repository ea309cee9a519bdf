#include "resfluor/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "resfluor/analytic.hpp"
#include "resfluor/dynamics.hpp"
#include "resfluor/model.hpp"
#include "resfluor/moments.hpp"
#include "resfluor/trajectories.hpp"

namespace resfluor {

namespace {

std::string num(double v) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        const double frac =
            points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        grid[i] = lo * std::pow(hi / lo, frac);
    }
    return grid;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        const double frac =
            points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        grid[i] = lo + (hi - lo) * frac;
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

CriterionResult run_criterion(const std::string& id, const std::string& name,
                              const std::function<void(CriterionResult&)>& body) {
    CriterionResult result;
    result.id = id;
    result.name = name;
    try {
        body(result);
    } catch (const std::exception& err) {
        result.passed = false;
        result.detail = std::string("exception: ") + err.what();
    }
    return result;
}

CriterionResult criterion_a1() {
    return run_criterion("A1", "filtered two-photon correlation values",
                         [](CriterionResult& r) {
        const double at_gamma = gN_filtered(2, 1.0, 1.0);
        const double at_third = gN_filtered(2, 1.0, 1.0 / 3.0);
        const double err = std::max(std::abs(at_gamma - 0.25),
                                    std::abs(at_third - 0.5625));
        r.passed = err <= 1e-12;
        r.detail = "g2(Gamma=gamma) = " + num(at_gamma) +
                   " vs 0.25, g2(Gamma=gamma/3) = " + num(at_third) +
                   " vs 0.5625, max err " + num(err) + " (tol 1e-12)";
    });
}

// With the fault injected, the value under test has the sign of the
// compensation term flipped in the numerator; the criterion must
// detect the mismatch and fail.
double homodyne_sign_flipped(double gamma, double Gamma, double f_prime) {
    const double numerator =
        4.0 * gamma + (4.0 - f_prime) * f_prime * (gamma + Gamma);
    const double denominator =
        (2.0 - f_prime) * (2.0 - f_prime) * (gamma + Gamma);
    const double ratio = numerator / denominator;
    return ratio * ratio;
}

CriterionResult criterion_a2(bool inject) {
    return run_criterion("A2", "homodyne cancellation at the compensation roots",
                         [inject](CriterionResult& r) {
        double worst = 0.0;
        for (double Gamma : log_grid(1e-2, 1e2, 50)) {
            const auto pair = compensation_condition(1.0, Gamma);
            for (double f : {pair.f_minus, pair.f_plus}) {
                const double value =
                    inject ? homodyne_sign_flipped(1.0, Gamma, f)
                           : g2_homodyne(1.0, Gamma, f);
                worst = std::max(worst, std::abs(value));
            }
        }
        r.passed = worst <= 1e-12;
        r.detail = "max |g2_homodyne| over 50 Gamma at both roots = " +
                   num(worst) + " (tol 1e-12)";
        if (inject) r.detail += " [fault injected]";
    });
}

CriterionResult criterion_a3() {
    return run_criterion("A3", "reference correlations at Gamma = gamma/5",
                         [](CriterionResult& r) {
        const double Gamma = 0.2;
        const double fm = compensation_condition(1.0, Gamma).f_minus;
        const double measured[6] = {
            gN_homodyne(2, 1.0, Gamma, fm), gN_homodyne(3, 1.0, Gamma, fm),
            gN_homodyne(4, 1.0, Gamma, fm), gN_filtered(2, 1.0, Gamma),
            gN_filtered(3, 1.0, Gamma),     gN_filtered(4, 1.0, Gamma)};
        const double expected[6] = {0.0, 0.36, 0.08, 0.69, 0.35, 0.14};
        double err = 0.0;
        for (int i = 0; i < 6; ++i) {
            err = std::max(err, std::abs(measured[i] - expected[i]));
        }
        r.passed = err <= 0.005;
        r.detail = "compensated (g2,g3,g4) = (" + num(measured[0]) + ", " +
                   num(measured[1]) + ", " + num(measured[2]) +
                   ") vs (0, 0.36, 0.08); plain = (" + num(measured[3]) +
                   ", " + num(measured[4]) + ", " + num(measured[5]) +
                   ") vs (0.69, 0.35, 0.14); max err " + num(err) +
                   " (tol 0.005)";
    });
}

CriterionResult criterion_a4() {
    return run_criterion("A4", "joint zeros of correlation orders",
                         [](CriterionResult& r) {
        const auto roots24 = joint_zero_filter(2, 4);
        const auto roots25 = joint_zero_filter(2, 5);
        const double sqrt13 = std::sqrt(13.0);
        const std::vector<double> want25 = {(4.0 - sqrt13) / 12.0,
                                            (4.0 + sqrt13) / 12.0};
        double rel = 0.0;
        bool shape = roots24.size() == 1 && roots25.size() == 2;
        if (shape) {
            rel = std::abs(roots24[0] - 1.0 / 24.0) * 24.0;
            for (int i = 0; i < 2; ++i) {
                rel = std::max(rel,
                               std::abs(roots25[i] - want25[i]) / want25[i]);
            }
        }
        r.passed = shape && rel <= 1e-10;
        r.detail = "orders (2,4): " + std::to_string(roots24.size()) +
                   " root(s), (2,5): " + std::to_string(roots25.size()) +
                   " root(s), max rel err " + num(rel) + " (tol 1e-10)";
        if (!roots24.empty()) {
            r.detail += "; Gamma(2,4) = " + num(roots24[0]) + " vs " +
                        num(1.0 / 24.0);
        }
    });
}

// Interference zeros and high-photon-amplitude coherences fall below
// what the dense oracle resolves in double precision (its measured
// noise tops out near 4e-14 in the two-photon-amplitude sector), so
// moments are compared relatively only above an absolute floor and
// must agree to the floor itself below it.
constexpr double kOracleFloor = 1e-12;

struct OracleGap {
    double relative = 0.0;    // max relative gap, moments >= floor
    double below_floor = 0.0; // max absolute gap, moments < floor
};

OracleGap oracle_gap(double scale) {
    const std::vector<double> gammas = {1.0 / 24.0, 0.2, 1.0 / 3.0, 1.0, 5.0};
    TruncationConfig trunc;
    trunc.n_max = 5;
    OracleGap worst;
    for (double Gamma : gammas) {
        const double fm = compensation_condition(1.0, Gamma).f_minus;
        for (double f : {0.0, fm}) {
            SystemParams p;
            p.omega_sigma = 1e-3 * scale;
            p.gamma_sigma = 1.0;
            p.Gamma = Gamma;
            p.g = 1e-3 * scale;
            HomodyneConfig h;
            h.f_prime = f;
            p = resolve_drive(p, h);
            const auto recursive = solve_recursive(p, 4);
            const auto dens = liouvillian_steady_state(p, h, trunc);
            const auto reference = moments_from_density(dens, p, 4);
            for (const auto& [idx, va] : recursive.entries) {
                if (idx.order() == 0) continue;
                const Complex vb = reference.at(idx);
                const double big = std::max(std::abs(va), std::abs(vb));
                const double dev = std::abs(va - vb);
                if (big >= kOracleFloor)
                    worst.relative = std::max(worst.relative, dev / big);
                else
                    worst.below_floor = std::max(worst.below_floor, dev);
            }
        }
    }
    return worst;
}

CriterionResult criterion_a5() {
    return run_criterion("A5", "recursive solver against Liouvillian oracle",
                         [](CriterionResult& r) {
        const OracleGap base = oracle_gap(1.0);
        const OracleGap halved = oracle_gap(0.5);
        const double floor_gap =
            std::max(base.below_floor, halved.below_floor);
        r.passed = base.relative <= 1e-3 && halved.relative < base.relative &&
                   floor_gap <= kOracleFloor;
        r.detail = "max rel gap over orders <= 4, 5 Gamma x 2 f_prime, "
                   "moments >= 1e-12: " + num(base.relative) +
                   " (tol 1e-3); halved drives: " + num(halved.relative) +
                   " (must tighten); below-floor gap " + num(floor_gap) +
                   " (tol 1e-12)";
    });
}

CriterionResult criterion_a6() {
    return run_criterion("A6", "mean-field decomposition identities",
                         [](CriterionResult& r) {
        double worst_identity = 0.0;
        Decomposition heitler, strong;
        const auto omegas = log_grid(1e-3, 1e2, 120);
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            const auto d = decompose_g2(sigma_field_moments(omegas[i], 1.0));
            const double scale =
                1.0 + std::abs(d.i0) + std::abs(d.i1) + std::abs(d.i2);
            worst_identity =
                std::max(worst_identity, std::abs(d.g2() - 0.0) / scale);
            if (i == 0) heitler = d;
            if (i + 1 == omegas.size()) strong = d;
        }
        for (double Gamma : log_grid(1e-2, 1e2, 60)) {
            SystemParams p;
            p.omega_sigma = 1e-3;
            p.gamma_sigma = 1.0;
            p.Gamma = Gamma;
            p.g = 1e-3;
            p.omega_a = 0.0;
            const auto table = solve_recursive(p, 4);
            const auto d = decompose_g2(detector_field_moments(table));
            const double direct = gN_from_moments(table, 2);
            const double scale = 1.0 + std::abs(d.i0) + std::abs(d.i1) +
                                 std::abs(d.i2) + std::abs(direct);
            worst_identity =
                std::max(worst_identity, std::abs(d.g2() - direct) / scale);
        }
        const double heitler_err =
            std::max({std::abs(heitler.i0 - 1.0), std::abs(heitler.i1),
                      std::abs(heitler.i2 + 2.0)});
        const double strong_err =
            std::max({std::abs(strong.i0 + 1.0), std::abs(strong.i1),
                      std::abs(strong.i2)});
        r.passed = worst_identity <= 1e-12 && heitler_err <= 1e-3 &&
                   strong_err <= 1e-2;
        r.detail = "identity residue " + num(worst_identity) +
                   " (tol 1e-12); Heitler (I0,I1,I2) = (" + num(heitler.i0) +
                   ", " + num(heitler.i1) + ", " + num(heitler.i2) +
                   ") vs (1, 0, -2) err " + num(heitler_err) +
                   " (tol 1e-3); strong drive (" + num(strong.i0) + ", " +
                   num(strong.i1) + ", " + num(strong.i2) +
                   ") vs (-1, 0, 0) err " + num(strong_err) + " (tol 1e-2)";
    });
}

CriterionResult criterion_a7() {
    return run_criterion("A7", "delayed emitter correlation closed form",
                         [](CriterionResult& r) {
        const auto tau_grid = linear_grid(0.0, 20.0, 401);
        double worst = 0.0;
        for (double omega : {1e-3, 0.05, 1.0}) {
            SystemParams p;
            p.omega_sigma = omega;
            p.gamma_sigma = 1.0;
            const double n = tls_steady_state(omega, 1.0).n_sigma;
            const auto sol =
                two_time_correlator(OperatorLabel::sigma_dagger,
                                    OperatorLabel::sigma, p, tau_grid);
            const auto series = sol.series(3, n * n, "g2_sigma");
            const auto values = series.g2_values();
            for (std::size_t i = 0; i < tau_grid.size(); ++i) {
                const double closed =
                    g2_tau_sigma_closed_form(omega, 1.0, tau_grid[i]);
                worst = std::max(worst, std::abs(values[i] - closed));
            }
        }
        r.passed = worst <= 1e-6;
        r.detail =
            "max |regression - closed form| over 3 drives x 401 tau = " +
            num(worst) + " (tol 1e-6)";
    });
}

CriterionResult criterion_a8() {
    return run_criterion("A8", "antibunching plateau of the compensated source",
                         [](CriterionResult& r) {
        SystemParams p;
        p.omega_sigma = 1e-3;
        p.gamma_sigma = 1.0;
        p.Gamma = 0.2;
        p.g = 1e-3;
        TruncationConfig trunc;
        const auto tau_grid = linear_grid(0.0, 2.0, 81);
        HomodyneConfig compensated;
        compensated.f_prime = compensation_condition(1.0, 0.2).f_minus;
        const auto comp =
            g2_tau_filtered(p, compensated, trunc, tau_grid).g2_values();
        const double plateau_max =
            *std::max_element(comp.begin(), comp.end());
        HomodyneConfig plain;
        const auto bare =
            g2_tau_filtered(p, plain, trunc, tau_grid).g2_values();
        r.passed = plateau_max <= 0.05 && bare.front() > 0.05;
        r.detail = "compensated max over |tau| <= 2/gamma = " +
                   num(plateau_max) + " (tol 0.05); plain g2(0) = " +
                   num(bare.front()) + " (must exceed 0.05)";
    });
}

CriterionResult criterion_a9() {
    return run_criterion("A9", "spectrum width and incoherent weight",
                         [](CriterionResult& r) {
        SystemParams p;
        p.omega_sigma = 1e-3;
        p.gamma_sigma = 1.0;
        p.Gamma = 0.2;
        const auto density_at = [&p](double omega) {
            return spectrum_numeric(p, p.Gamma, {omega}).density[0];
        };
        const double peak = density_at(0.0);
        double lo = 0.01, hi = 0.2;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (density_at(mid) > 0.5 * peak ? lo : hi) = mid;
        }
        const double fwhm = lo + hi;
        const double fwhm_err = std::abs(fwhm - p.Gamma) / p.Gamma;

        const auto unfiltered = spectrum_numeric(p, std::nullopt, {0.0});
        const double incoherent = 1.0 - unfiltered.delta_weight;
        const double target = 8.0 * p.omega_sigma * p.omega_sigma;
        const double weight_err = std::abs(incoherent - target) / target;
        r.passed = fwhm_err <= 0.01 && weight_err <= 0.01;
        r.detail = "filtered FWHM = " + num(fwhm) + " vs Gamma = " +
                   num(p.Gamma) + " (rel err " + num(fwhm_err) +
                   ", tol 0.01); incoherent weight = " + num(incoherent) +
                   " vs " + num(target) + " (rel err " + num(weight_err) +
                   ", tol 0.01)";
    });
}

CriterionResult criterion_a10() {
    return run_criterion("A10", "emission rates and compensated ratio",
                         [](CriterionResult& r) {
        SystemParams p;
        p.omega_sigma = 0.3;
        p.gamma_sigma = 1.0;
        p.Gamma = 0.2;
        HomodyneConfig h;
        h.f_prime = compensation_condition(1.0, 0.2).f_minus;
        h.t = 1.0;
        const auto rates = emission_rates(p, h);
        const double rf_err = std::abs(rates.i_rf - 4.0 * 0.3 * 0.3);
        const double ratio_err = std::abs(rates.ratio - 1.0 / 6.0);
        r.passed = rf_err <= 1e-12 && ratio_err <= 1e-12;
        r.detail = "i_rf = " + num(rates.i_rf) + " vs 0.36 (err " +
                   num(rf_err) + "); compensated ratio = " +
                   num(rates.ratio) + " vs 1/6 (err " + num(ratio_err) +
                   "), tol 1e-12";
    });
}

double empirical_cdf(const std::vector<double>& sorted, double x) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) /
           static_cast<double>(sorted.size());
}

std::vector<double> normalized_gaps(const ClickTrain& train) {
    std::vector<double> gaps;
    if (train.times.size() < 2) return gaps;
    const double rate =
        static_cast<double>(train.times.size()) / train.duration;
    gaps.reserve(train.times.size() - 1);
    for (std::size_t i = 1; i < train.times.size(); ++i) {
        gaps.push_back((train.times[i] - train.times[i - 1]) * rate);
    }
    std::sort(gaps.begin(), gaps.end());
    return gaps;
}

// One-sample Kolmogorov-Smirnov statistic against 1 - exp(-x),
// rescaled per Stephens so the alpha = 1e-3 critical value is 1.9495
// independent of sample size.
double ks_statistic_exponential(const std::vector<double>& sorted) {
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double model = 1.0 - std::exp(-sorted[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - model;
        const double lo = model - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
}

CriterionResult criterion_a11(std::uint64_t seed) {
    return run_criterion("A11", "Monte Carlo click statistics",
                         [seed](CriterionResult& r) {
        SystemParams p;
        p.omega_sigma = 0.05;
        p.gamma_sigma = 1.0;
        p.Gamma = 0.2;
        p.g = 0.1;
        TruncationConfig trunc;
        HomodyneConfig plain;
        HomodyneConfig compensated;
        compensated.f_prime = compensation_condition(1.0, 0.2).f_minus;

        const auto mean_photons = [&](const HomodyneConfig& h) {
            const auto dens = liouvillian_steady_state(p, h, trunc);
            const auto table = moments_from_density(dens, p, 2);
            return table.at(MomentIndex{0, 0, 1, 1}).real();
        };
        const double n_plain = mean_photons(plain);
        const double n_comp = mean_photons(compensated);

        const double t_plain = 6e7;
        const double t_comp = 7e7;
        const auto train_plain =
            simulate_clicks(p, plain, trunc, t_plain, seed);
        const auto train_comp =
            simulate_clicks(p, compensated, trunc, t_comp, seed + 1);

        std::vector<std::string> failures;
        const auto check_rate = [&](const ClickTrain& train, double n_a,
                                    const char* tag) {
            const double clicks = static_cast<double>(train.times.size());
            const double measured = clicks / train.duration;
            const double expected = p.Gamma * n_a;
            const double sigma = std::sqrt(clicks) / train.duration;
            if (std::abs(measured - expected) > 3.0 * sigma) {
                failures.push_back(std::string(tag) + " rate " +
                                   num(measured) + " vs " + num(expected) +
                                   " (3 sigma " + num(3.0 * sigma) + ")");
            }
            return measured;
        };
        const double rate_plain = check_rate(train_plain, n_plain, "plain");
        check_rate(train_comp, n_comp, "compensated");

        const auto est_plain = g2_zero_from_clicks(train_plain, 0.2);
        const double eq_plain = gN_filtered(2, 1.0, 0.2);
        if (std::abs(est_plain.value - eq_plain) >
            3.0 * est_plain.standard_error) {
            failures.push_back("plain g2(0) " + num(est_plain.value) +
                               " vs " + num(eq_plain) + " (3 sigma " +
                               num(3.0 * est_plain.standard_error) + ")");
        }
        const auto est_comp = g2_zero_from_clicks(train_comp, 2.0);
        if (std::abs(est_comp.value) > 3.0 * est_comp.standard_error) {
            failures.push_back("compensated g2(0) " + num(est_comp.value) +
                               " vs 0 (3 sigma " +
                               num(3.0 * est_comp.standard_error) + ")");
        }

        const double t_poisson = 1e5 / rate_plain;
        const auto train_coherent =
            poisson_train(rate_plain, t_poisson, seed + 2);
        const auto gaps_coherent = normalized_gaps(train_coherent);
        const double ks = ks_statistic_exponential(gaps_coherent);
        if (ks > 1.9495) {
            failures.push_back("coherent KS statistic " + num(ks) +
                               " exceeds 1.9495 (alpha 1e-3)");
        }

        const auto gaps_plain = normalized_gaps(train_plain);
        const auto gaps_comp = normalized_gaps(train_comp);
        const auto binomial_sigma = [](double c, double n) {
            return std::sqrt((n * c * (1.0 - c) + 1.0)) / n;
        };
        int ordering_violations = 0;
        for (double x : log_grid(5e-4, 1.0, 16)) {
            const double c_comp = empirical_cdf(gaps_comp, x);
            const double c_plain = empirical_cdf(gaps_plain, x);
            const double c_coh = empirical_cdf(gaps_coherent, x);
            const double s_comp = binomial_sigma(
                c_comp, static_cast<double>(gaps_comp.size()));
            const double s_plain = binomial_sigma(
                c_plain, static_cast<double>(gaps_plain.size()));
            const double s_coh = binomial_sigma(
                c_coh, static_cast<double>(gaps_coherent.size()));
            if (c_comp > c_plain + 3.0 * std::hypot(s_comp, s_plain) ||
                c_plain > c_coh + 3.0 * std::hypot(s_plain, s_coh)) {
                ++ordering_violations;
            }
        }
        if (ordering_violations > 0) {
            failures.push_back(
                std::to_string(ordering_violations) +
                " waiting-time CDF ordering violations beyond error bars");
        }

        r.passed = failures.empty();
        if (failures.empty()) {
            r.detail = "rates, g2(0) = " + num(est_plain.value) + " vs " +
                       num(eq_plain) + " and " + num(est_comp.value) +
                       " vs 0, KS = " + num(ks) +
                       " <= 1.9495, CDF ordering all within 3 sigma (" +
                       std::to_string(train_plain.times.size()) + " + " +
                       std::to_string(train_comp.times.size()) +
                       " simulated clicks)";
        } else {
            r.detail = failures.front();
            for (std::size_t i = 1; i < failures.size(); ++i) {
                r.detail += "; " + failures[i];
            }
        }
    });
}

}  // namespace

bool SuiteReport::all_passed() const {
    for (const auto& c : criteria) {
        if (!c.skipped && !c.passed) return false;
    }
    return true;
}

SuiteReport run_acceptance_suite(const SuiteOptions& opts) {
    SuiteReport report;
    report.criteria.push_back(criterion_a1());
    report.criteria.push_back(criterion_a2(opts.inject_homodyne_sign_flip));
    report.criteria.push_back(criterion_a3());
    report.criteria.push_back(criterion_a4());
    report.criteria.push_back(criterion_a5());
    report.criteria.push_back(criterion_a6());
    report.criteria.push_back(criterion_a7());
    report.criteria.push_back(criterion_a8());
    report.criteria.push_back(criterion_a9());
    report.criteria.push_back(criterion_a10());
    if (opts.quick) {
        CriterionResult skipped;
        skipped.id = "A11";
        skipped.name = "Monte Carlo click statistics";
        skipped.passed = true;
        skipped.skipped = true;
        skipped.detail = "skipped (--quick)";
        report.criteria.push_back(skipped);
    } else {
        report.criteria.push_back(criterion_a11(opts.seed));
    }
    return report;
}

void print_report(const SuiteReport& report, std::ostream& out) {
    for (const auto& c : report.criteria) {
        const char* verdict = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
        out << c.id << "  " << verdict << "  " << c.name << ": " << c.detail
            << "\n";
    }
    out << (report.all_passed() ? "all criteria passed"
                                : "ACCEPTANCE FAILURE")
        << "\n";
}

}  // namespace resfluor
