#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "resfluor/analytic.hpp"
#include "resfluor/dynamics.hpp"
#include "resfluor/model.hpp"
#include "resfluor/moments.hpp"

using namespace resfluor;

namespace {

std::vector<double> linear_grid(double lo, double hi, int points) {
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = lo + (hi - lo) * double(i) / double(points - 1);
    return grid;
}

SystemParams weak_detector_params() {
    SystemParams p;
    p.omega_sigma = 1e-3;
    p.gamma_sigma = 1.0;
    p.Gamma = 0.2;
    p.g = 1e-3;
    p.omega_a = 0.0;
    return p;
}

}  // namespace

TEST_CASE("matrix exponential on a defective generator") {
    Eigen::MatrixXcd nilpotent = Eigen::MatrixXcd::Zero(2, 2);
    nilpotent(0, 1) = 1.0;
    const MatrixExponential expm(nilpotent);
    CHECK_FALSE(expm.used_eigendecomposition());

    Eigen::VectorXcd v(2);
    v << Complex(0.25, 0.0), Complex(1.5, 0.0);
    const Eigen::VectorXcd y = expm.apply(1.0, v);
    CHECK(y(0).real() == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(y(1).real() == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(std::abs(y(0).imag()) < 1e-15);

    SUBCASE("repeated eigenvalue with a shear") {
        Eigen::MatrixXcd jordan(2, 2);
        jordan << Complex(-1.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.0),
            Complex(-1.0, 0.0);
        const MatrixExponential shear(jordan);
        CHECK_FALSE(shear.used_eigendecomposition());
        Eigen::VectorXcd w(2);
        w << Complex(1.0, 0.0), Complex(1.0, 0.0);
        const Eigen::VectorXcd z = shear.apply(2.0, w);
        const double scale = std::exp(-2.0);
        CHECK(z(0).real() == doctest::Approx(3.0 * scale).epsilon(1e-12));
        CHECK(z(1).real() == doctest::Approx(scale).epsilon(1e-12));
    }
}

TEST_CASE("matrix exponential on a diagonalizable generator") {
    Eigen::MatrixXcd rotation(2, 2);
    rotation << Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(-1.0, 0.0),
        Complex(0.0, 0.0);
    const MatrixExponential expm(rotation);
    CHECK(expm.used_eigendecomposition());

    Eigen::VectorXcd v(2);
    v << Complex(1.0, 0.0), Complex(0.0, 0.0);
    const double quarter_turn = 2.0 * std::atan(1.0);
    const Eigen::VectorXcd y = expm.apply(quarter_turn, v);
    CHECK(std::abs(y(0)) < 1e-12);
    CHECK(y(1).real() == doctest::Approx(-1.0).epsilon(1e-12));

    SUBCASE("forward then backward evolution is the identity") {
        Eigen::VectorXcd w(2);
        w << Complex(0.3, -0.2), Complex(-1.2, 0.7);
        const Eigen::VectorXcd back = expm.apply(-0.7, expm.apply(0.7, w));
        CHECK(std::abs(back(0) - w(0)) < 1e-13);
        CHECK(std::abs(back(1) - w(1)) < 1e-13);
    }
}

TEST_CASE("closed-form delayed correlation of the bare emitter") {
    CHECK(g2_tau_sigma_closed_form(0.3, 1.0, 0.0) == 0.0);
    CHECK(g2_tau_sigma_closed_form(0.05, 1.0, 50.0) ==
          doctest::Approx(1.0).epsilon(1e-9));

    SUBCASE("weak drive reduces to the single-exponential square") {
        for (double tau : {0.5, 1.0, 2.0, 5.0}) {
            const double expected = std::pow(1.0 - std::exp(-0.5 * tau), 2);
            CHECK(std::abs(g2_tau_sigma_closed_form(1e-5, 1.0, tau) -
                           expected) < 1e-6);
        }
    }
    SUBCASE("strong drive overshoots one") {
        double peak = 0.0;
        for (double tau : linear_grid(0.0, 5.0, 501))
            peak = std::max(peak, g2_tau_sigma_closed_form(1.0, 1.0, tau));
        CHECK(peak > 1.05);
    }
    SUBCASE("rejects bad arguments") {
        CHECK_THROWS_AS(g2_tau_sigma_closed_form(0.3, 0.0, 1.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(g2_tau_sigma_closed_form(0.3, 1.0, -1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("operator label parsing") {
    CHECK(operator_label("1") == OperatorLabel::identity);
    CHECK(operator_label("sigma") == OperatorLabel::sigma);
    CHECK(operator_label("sigma_dagger") == OperatorLabel::sigma_dagger);
    CHECK_THROWS_WITH_AS(operator_label("a_dagger"),
                         doctest::Contains("unsupported operator label"),
                         std::invalid_argument);
}

TEST_CASE("regression solution reproduces steady moments") {
    SystemParams p;
    p.omega_sigma = 0.3;
    p.gamma_sigma = 1.0;
    const auto ss = tls_steady_state(p.omega_sigma, p.gamma_sigma);
    const auto grid = linear_grid(0.0, 10.0, 41);

    SUBCASE("identity sandwich is stationary") {
        const auto sol = two_time_correlator(OperatorLabel::identity,
                                             OperatorLabel::identity, p, grid);
        CHECK(std::abs(sol.lr_mean - Complex(1.0, 0.0)) < 1e-14);
        for (std::size_t k : {std::size_t(0), grid.size() - 1}) {
            CHECK(std::abs(sol.components[0][k] - ss.alpha) < 1e-12);
            CHECK(std::abs(sol.components[2][k] - Complex(ss.n_sigma, 0.0)) <
                  1e-12);
        }
    }
    SUBCASE("two dipole operators annihilate the initial state") {
        const auto sol = two_time_correlator(
            OperatorLabel::sigma_dagger, OperatorLabel::sigma, p, grid);
        CHECK(std::abs(sol.lr_mean - Complex(ss.n_sigma, 0.0)) < 1e-14);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(sol.components[i][0]) < 1e-14);
        const Complex late = sol.components[2].back();
        CHECK(std::abs(late - Complex(ss.n_sigma * ss.n_sigma, 0.0)) < 1e-4);
    }
    SUBCASE("field coherence decays to the coherent background") {
        const auto sol = two_time_correlator(
            OperatorLabel::sigma_dagger, OperatorLabel::identity, p,
            linear_grid(0.0, 50.0, 11));
        CHECK(std::abs(sol.components[0][0] - Complex(ss.n_sigma, 0.0)) <
              1e-14);
        CHECK(std::abs(sol.components[0].back() -
                       Complex(std::norm(ss.alpha), 0.0)) < 1e-9);
    }
}

TEST_CASE("regression matches the closed-form delayed correlation") {
    SystemParams p;
    p.omega_sigma = 0.05;
    p.gamma_sigma = 1.0;
    const auto ss = tls_steady_state(p.omega_sigma, p.gamma_sigma);
    const auto grid = linear_grid(0.0, 10.0, 101);
    const auto sol = two_time_correlator(OperatorLabel::sigma_dagger,
                                         OperatorLabel::sigma, p, grid);
    const auto g2 =
        sol.series(3, ss.n_sigma * ss.n_sigma, "g2_sigma").g2_values();
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
        worst = std::max(worst,
                         std::abs(g2[k] - g2_tau_sigma_closed_form(
                                              p.omega_sigma, p.gamma_sigma,
                                              grid[k])));
    CHECK(worst < 1e-6);

    SUBCASE("series argument validation") {
        CHECK_THROWS_AS(sol.series(0, 1.0, "bad"), std::invalid_argument);
        CHECK_THROWS_AS(sol.series(4, 1.0, "bad"), std::invalid_argument);
        CHECK_THROWS_AS(sol.series(3, 0.0, "bad"), std::invalid_argument);
    }
    SUBCASE("tau grid validation") {
        const std::vector<double> shifted{0.1, 0.2};
        CHECK_THROWS_WITH_AS(
            two_time_correlator(OperatorLabel::sigma_dagger,
                                OperatorLabel::sigma, p, shifted),
            doctest::Contains("tau grid must start at 0"),
            std::invalid_argument);
        const std::vector<double> stalled{0.0, 1.0, 1.0};
        CHECK_THROWS_WITH_AS(
            two_time_correlator(OperatorLabel::sigma_dagger,
                                OperatorLabel::sigma, p, stalled),
            doctest::Contains("strictly increasing"), std::invalid_argument);
    }
}

TEST_CASE("delayed correlation of the detected field") {
    SystemParams p = weak_detector_params();
    HomodyneConfig h;
    TruncationConfig trunc;
    const auto grid = linear_grid(0.0, 40.0, 201);

    SUBCASE("plain filter: starts at the steady correlation, relaxes to one") {
        // The approach to one is governed by the slowest detector mode
        // at rate Gamma/2 = 0.1, so the grid runs to tau = 150 where
        // that mode has decayed below 1e-6.
        const auto long_grid = linear_grid(0.0, 150.0, 301);
        const auto series = g2_tau_filtered(p, h, trunc, long_grid);
        const auto values = series.g2_values();
        const SystemParams resolved = resolve_drive(p, h);
        const double expected =
            gN_from_moments(solve_recursive(resolved, 4), 2);
        CHECK(values.front() == doctest::Approx(expected).epsilon(1e-10));
        CHECK(values.back() == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("compensated filter: suppressed at zero delay") {
        h.f_prime = compensation_condition(p.gamma_sigma, p.Gamma).f_minus;
        const auto series = g2_tau_filtered(p, h, trunc, grid);
        CHECK(std::abs(series.g2_values().front()) < 1e-4);
    }
    SUBCASE("rejects a grid that skips zero delay") {
        const std::vector<double> shifted{1.0, 2.0};
        CHECK_THROWS_WITH_AS(g2_tau_filtered(p, h, trunc, shifted),
                             doctest::Contains("tau grid must start at 0"),
                             std::invalid_argument);
    }
    SUBCASE("rejects invalid parameters") {
        p.gamma_sigma = -1.0;
        CHECK_THROWS_WITH_AS(g2_tau_filtered(p, h, trunc, grid),
                             doctest::Contains("invalid configuration"),
                             std::invalid_argument);
    }
}

TEST_CASE("correlation series value screening") {
    CorrelationSeries series;
    series.tau_grid = {0.0, 1.0};
    series.label = "screen";

    SUBCASE("clamps sub-tolerance residues to zero") {
        series.values = {Complex(-5e-9, 5e-9), Complex(0.5, 0.0)};
        const auto values = series.g2_values();
        CHECK(values[0] == 0.0);
        CHECK(values[1] == 0.5);
    }
    SUBCASE("rejects an imaginary residue") {
        series.values = {Complex(0.5, 1e-3), Complex(0.5, 0.0)};
        CHECK_THROWS_WITH_AS(series.g2_values(),
                             doctest::Contains("imaginary residue"),
                             std::runtime_error);
    }
    SUBCASE("rejects a negative correlation") {
        series.values = {Complex(-0.5, 0.0), Complex(0.5, 0.0)};
        CHECK_THROWS_WITH_AS(series.g2_values(),
                             doctest::Contains("negative value"),
                             std::runtime_error);
    }
}

TEST_CASE("plateau measurement") {
    CorrelationSeries series;
    series.tau_grid = {0.0, 1.0, 2.0, 3.0};
    series.label = "plateau";

    SUBCASE("reports the last point before the threshold crossing") {
        series.values = {Complex(0.01, 0.0), Complex(0.02, 0.0),
                         Complex(0.06, 0.0), Complex(0.07, 0.0)};
        CHECK(plateau_width(series, 0.05) == 1.0);
    }
    SUBCASE("zero when the series starts above threshold") {
        series.values = {Complex(0.06, 0.0), Complex(0.01, 0.0),
                         Complex(0.01, 0.0), Complex(0.01, 0.0)};
        CHECK(plateau_width(series, 0.05) == 0.0);
    }
    SUBCASE("full range when the threshold is never crossed") {
        series.values = {Complex(0.01, 0.0), Complex(0.02, 0.0),
                         Complex(0.03, 0.0), Complex(0.04, 0.0)};
        CHECK(plateau_width(series, 0.05) == 3.0);
    }
    SUBCASE("rejects an empty series") {
        CorrelationSeries empty;
        CHECK_THROWS_AS(plateau_width(empty, 0.05), std::invalid_argument);
    }
}

TEST_CASE("numeric spectrum") {
    SystemParams p;
    p.omega_sigma = 0.05;
    p.gamma_sigma = 1.0;
    const auto ss = tls_steady_state(p.omega_sigma, p.gamma_sigma);
    const double coherent_fraction = std::norm(ss.alpha) / ss.n_sigma;

    SUBCASE("delta weight equals the coherent fraction") {
        const auto curve = spectrum_numeric(p, std::nullopt, {0.0});
        CHECK(curve.delta_weight ==
              doctest::Approx(coherent_fraction).epsilon(1e-12));
        CHECK(curve.delta_location == 0.0);
    }
    SUBCASE("density plus delta integrates to one") {
        std::vector<double> grid;
        const int tail_points = 260;
        const double ratio = std::pow(1000.0, 1.0 / tail_points);
        for (int k = tail_points; k >= 1; --k)
            grid.push_back(-2.0 * std::pow(ratio, k));
        for (double w : linear_grid(-2.0, 2.0, 801)) grid.push_back(w);
        for (int k = 1; k <= tail_points; ++k)
            grid.push_back(2.0 * std::pow(ratio, k));

        const auto curve = spectrum_numeric(p, std::nullopt, grid);
        double integral = curve.delta_weight;
        for (std::size_t i = 1; i < grid.size(); ++i)
            integral += 0.5 * (curve.density[i] + curve.density[i - 1]) *
                        (grid[i] - grid[i - 1]);
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));
    }
    SUBCASE("a detector resolution folds the delta into the density") {
        const double resolution = 0.01;
        const auto curve = spectrum_numeric(p, resolution, {0.0});
        CHECK(curve.delta_weight == 0.0);
        const double folded_peak =
            coherent_fraction * 2.0 / (3.14159265358979323846 * resolution);
        CHECK(curve.density[0] ==
              doctest::Approx(folded_peak).epsilon(0.01));
    }
    SUBCASE("grid validation") {
        const std::vector<double> empty;
        CHECK_THROWS_WITH_AS(spectrum_numeric(p, std::nullopt, empty),
                             doctest::Contains("must not be empty"),
                             std::invalid_argument);
        const std::vector<double> stalled{0.0, 0.0};
        CHECK_THROWS_WITH_AS(spectrum_numeric(p, std::nullopt, stalled),
                             doctest::Contains("strictly increasing"),
                             std::invalid_argument);
        const std::vector<double> coarse{-1.0, 0.0, 1.0};
        CHECK_THROWS_WITH_AS(spectrum_numeric(p, std::nullopt, coarse),
                             doctest::Contains("too coarse"),
                             std::invalid_argument);
        CHECK_THROWS_WITH_AS(spectrum_numeric(p, -1.0, {0.0}),
                             doctest::Contains("resolution must be positive"),
                             std::invalid_argument);
    }
    SUBCASE("undriven emitter has no spectrum") {
        p.omega_sigma = 0.0;
        CHECK_THROWS_WITH_AS(spectrum_numeric(p, std::nullopt, {0.0}),
                             doctest::Contains("population is zero"),
                             std::runtime_error);
    }
}
