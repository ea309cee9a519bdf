#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "resfluor/analytic.hpp"
#include "resfluor/model.hpp"
#include "resfluor/moments.hpp"

using namespace resfluor;

namespace {

SystemParams weak_params(double Gamma) {
    SystemParams p;
    p.omega_sigma = 1e-3;
    p.gamma_sigma = 1.0;
    p.Gamma = Gamma;
    p.g = 1e-3;
    p.omega_a = 0.0;
    return p;
}

Complex coefficient_on(const std::vector<std::pair<MomentIndex, Complex>>& eq,
                       const MomentIndex& target) {
    Complex out(0.0, 0.0);
    bool found = false;
    for (const auto& [idx, value] : eq) {
        if (idx == target) {
            REQUIRE_FALSE(found);
            found = true;
            out = value;
        }
    }
    REQUIRE(found);
    return out;
}

}  // namespace

TEST_CASE("equation of motion for the detector amplitude") {
    SystemParams p;
    p.omega_sigma = 0.2;
    p.gamma_sigma = 1.3;
    p.Gamma = 0.7;
    p.g = 0.05;
    p.omega_a = 0.01;
    const MomentIndex mean_a{0, 0, 0, 1};
    const auto eq = regression_coefficients(mean_a, p);
    CHECK(eq.size() == 3);
    const MomentIndex self{0, 0, 0, 1};
    const MomentIndex unit{0, 0, 0, 0};
    const MomentIndex mean_sigma{0, 1, 0, 0};
    CHECK(coefficient_on(eq, self) == Complex(-0.35, 0.0));
    CHECK(coefficient_on(eq, unit) == Complex(0.01, 0.0));
    CHECK(coefficient_on(eq, mean_sigma) == Complex(0.0, -0.05));
}

TEST_CASE("equation of motion for the emitter amplitude") {
    SystemParams p;
    p.omega_sigma = 0.2;
    p.gamma_sigma = 1.3;
    p.Gamma = 0.7;
    p.g = 0.05;
    p.omega_a = 0.01;
    const MomentIndex mean_sigma{0, 1, 0, 0};
    const auto eq = regression_coefficients(mean_sigma, p);
    CHECK(eq.size() == 3);
    const MomentIndex self{0, 1, 0, 0};
    const MomentIndex unit{0, 0, 0, 0};
    const MomentIndex population{1, 1, 0, 0};
    CHECK(coefficient_on(eq, self) == Complex(-0.65, 0.0));
    CHECK(coefficient_on(eq, unit) == Complex(0.0, -0.2));
    CHECK(coefficient_on(eq, population) == Complex(0.0, 0.4));

    const MomentIndex conj_sigma{1, 0, 0, 0};
    const auto conj_eq = regression_coefficients(conj_sigma, p);
    CHECK(coefficient_on(conj_eq, unit) == Complex(0.0, 0.2));
    const MomentIndex conj_population{1, 1, 0, 0};
    CHECK(coefficient_on(conj_eq, conj_population) == Complex(0.0, -0.4));
}

TEST_CASE("equation of motion for the detector population") {
    SystemParams p;
    p.omega_sigma = 0.2;
    p.gamma_sigma = 1.3;
    p.Gamma = 0.7;
    p.g = 0.05;
    p.omega_a = 0.01;
    const MomentIndex population{0, 0, 1, 1};
    const auto eq = regression_coefficients(population, p);
    CHECK(eq.size() == 5);
    const MomentIndex self{0, 0, 1, 1};
    const MomentIndex creator{0, 0, 1, 0};
    const MomentIndex annihilator{0, 0, 0, 1};
    const MomentIndex cross_up{1, 0, 0, 1};
    const MomentIndex cross_down{0, 1, 1, 0};
    CHECK(coefficient_on(eq, self) == Complex(-0.7, 0.0));
    CHECK(coefficient_on(eq, creator) == Complex(0.01, 0.0));
    CHECK(coefficient_on(eq, annihilator) == Complex(0.01, 0.0));
    CHECK(coefficient_on(eq, cross_up) == Complex(0.0, 0.05));
    CHECK(coefficient_on(eq, cross_down) == Complex(0.0, -0.05));
}

TEST_CASE("cross moment couples through the photon-order ladder") {
    SystemParams p;
    p.omega_sigma = 0.2;
    p.gamma_sigma = 1.3;
    p.Gamma = 0.7;
    p.g = 0.05;
    p.omega_a = 0.01;
    const MomentIndex cross{0, 1, 1, 0};
    const auto eq = regression_coefficients(cross, p);
    const MomentIndex self{0, 1, 1, 0};
    const MomentIndex ladder{1, 1, 0, 0};
    CHECK(coefficient_on(eq, self) == Complex(-0.65 - 0.35, 0.0));
    CHECK(coefficient_on(eq, ladder) == Complex(0.0, 0.05));
}

TEST_CASE("steady emitter moments match the weak-drive closed forms") {
    SystemParams p;
    p.omega_sigma = 1e-4;
    p.gamma_sigma = 1.7;
    p.Gamma = 0.4;
    p.g = 0.0;
    p.omega_a = 0.0;
    const MomentIndex mean{0, 1, 0, 0};
    const MomentIndex population{1, 1, 0, 0};

    // The recursion is exact to leading order in omega_sigma; the full
    // emitter closed forms deviate at relative order 8 (omega/gamma)^2,
    // about 3e-8 here.
    const auto table = solve_recursive(p, 2);
    const auto ss = tls_steady_state(p.omega_sigma, p.gamma_sigma);
    CHECK(std::abs(table.at(mean) - ss.alpha) < 1e-6 * std::abs(ss.alpha));
    CHECK(table.at(population).real() ==
          doctest::Approx(ss.n_sigma).epsilon(1e-6));
    CHECK(table.at(population).imag() == 0.0);

    // The leading-order values themselves are reproduced exactly at any
    // drive strength.
    p.omega_sigma = 0.3;
    const auto strong = solve_recursive(p, 2);
    const Complex leading_mean(0.0, -2.0 * 0.3 / 1.7);
    const double leading_population = 4.0 * 0.3 * 0.3 / (1.7 * 1.7);
    CHECK(std::abs(strong.at(mean) - leading_mean) < 1e-15);
    CHECK(strong.at(population).real() ==
          doctest::Approx(leading_population).epsilon(1e-12));
}

TEST_CASE("conjugation symmetry is exact across the table") {
    SystemParams p;
    p.omega_sigma = 0.2;
    p.gamma_sigma = 1.0;
    p.Gamma = 0.7;
    p.g = 0.05;
    p.omega_a = 0.01;
    const auto table = solve_recursive(p, 4);
    const MomentIndex unit{0, 0, 0, 0};
    CHECK(table.at(unit) == Complex(1.0, 0.0));
    for (const auto& [idx, value] : table.entries) {
        CHECK(table.at(idx.conjugate()) == std::conj(value));
    }
}

TEST_CASE("sensor-limit correlations reproduce the analytic values") {
    SUBCASE("second order at Gamma = gamma/3") {
        const auto table = solve_recursive(weak_params(1.0 / 3.0), 4);
        CHECK(gN_from_moments(table, 2) ==
              doctest::Approx(0.5625).epsilon(1e-4));
    }
    SUBCASE("orders three and four at Gamma = gamma/5") {
        const auto table = solve_recursive(weak_params(0.2), 8);
        CHECK(gN_from_moments(table, 2) ==
              doctest::Approx(25.0 / 36.0).epsilon(1e-4));
        CHECK(gN_from_moments(table, 3) ==
              doctest::Approx(gN_filtered(3, 1.0, 0.2)).epsilon(1e-3));
        CHECK(gN_from_moments(table, 4) ==
              doctest::Approx(gN_filtered(4, 1.0, 0.2)).epsilon(1e-3));
    }
    SUBCASE("homodyne admixture at the lower compensation root") {
        SystemParams p = weak_params(0.2);
        HomodyneConfig h;
        h.f_prime = compensation_condition(1.0, 0.2).f_minus;
        p = resolve_drive(p, h);
        const auto table = solve_recursive(p, 8);
        CHECK(std::abs(gN_from_moments(table, 2)) < 1e-6);
        CHECK(gN_from_moments(table, 3) ==
              doctest::Approx(gN_homodyne(3, 1.0, 0.2, h.f_prime))
                  .epsilon(1e-3));
        CHECK(gN_from_moments(table, 4) ==
              doctest::Approx(gN_homodyne(4, 1.0, 0.2, h.f_prime))
                  .epsilon(1e-3));
    }
}

TEST_CASE("density-operator oracle agrees with the recursion") {
    SystemParams p = weak_params(0.2);
    HomodyneConfig h;
    h.f_prime = compensation_condition(1.0, 0.2).f_minus;
    p = resolve_drive(p, h);
    TruncationConfig trunc;
    trunc.n_max = 5;

    const auto dens = liouvillian_steady_state(p, h, trunc);
    CHECK(std::abs(dens.matrix.trace() - Complex(1.0, 0.0)) < 1e-12);
    CHECK((dens.matrix - dens.matrix.adjoint()).norm() < 1e-12);
    CHECK(dens.top_two_population() < trunc.tol);

    const auto reference = moments_from_density(dens, p, 4);
    const auto recursive = solve_recursive(p, 4);

    // Interference at the compensation root suppresses some moments
    // many orders of magnitude below the rest of their block (the
    // two-photon amplitude drops to numerical zero), so each moment is
    // compared at the scale of the largest moment of its order.
    std::array<double, 5> scale{};
    for (const auto& [idx, value] : recursive.entries)
        scale[idx.order()] = std::max(scale[idx.order()], std::abs(value));
    double worst = 0.0;
    for (const auto& [idx, value] : recursive.entries) {
        if (idx.order() == 0) continue;
        const Complex other = reference.at(idx);
        worst = std::max(worst,
                         std::abs(value - other) / scale[idx.order()]);
    }
    CHECK(worst < 1e-3);

    const MomentIndex detector_population{0, 0, 1, 1};
    const MomentIndex two_photon{0, 0, 0, 2};
    CHECK(std::abs(recursive.at(detector_population) -
                   reference.at(detector_population)) <
          1e-3 * std::abs(reference.at(detector_population)));
    CHECK(std::abs(reference.at(two_photon)) <
          1e-3 * std::abs(reference.at(detector_population)));
}

TEST_CASE("moment extraction is consistent with the density matrix") {
    SystemParams p;
    p.omega_sigma = 0.1;
    p.gamma_sigma = 1.0;
    p.Gamma = 0.4;
    p.g = 0.05;
    HomodyneConfig h;
    h.f_prime = 0.7;
    p = resolve_drive(p, h);
    TruncationConfig trunc;

    const auto dens = liouvillian_steady_state(p, h, trunc);
    const auto table = moments_from_density(dens, p, 2);
    const MomentIndex unit{0, 0, 0, 0};
    const MomentIndex population{0, 0, 1, 1};
    CHECK(table.at(unit) == Complex(1.0, 0.0));
    CHECK(table.at(population).real() > 0.0);
    CHECK(table.at(population).imag() == 0.0);
    for (const auto& [idx, value] : table.entries) {
        CHECK(table.at(idx.conjugate()) == std::conj(value));
    }
}

TEST_CASE("error paths") {
    SUBCASE("invalid parameters are rejected") {
        SystemParams p = weak_params(0.2);
        p.gamma_sigma = -1.0;
        CHECK_THROWS_AS(solve_recursive(p, 2), std::invalid_argument);
        CHECK_THROWS_WITH_AS(
            liouvillian_steady_state(p, HomodyneConfig{}, TruncationConfig{}),
            doctest::Contains("invalid configuration"), std::invalid_argument);
    }
    SUBCASE("negative order") {
        CHECK_THROWS_AS(solve_recursive(weak_params(0.2), -1),
                        std::invalid_argument);
    }
    SUBCASE("truncation too tight for strong coupling") {
        SystemParams p;
        p.omega_sigma = 0.5;
        p.gamma_sigma = 1.0;
        p.Gamma = 0.2;
        p.g = 0.5;
        TruncationConfig trunc;
        trunc.n_max = 2;
        CHECK_THROWS_WITH_AS(
            liouvillian_steady_state(p, HomodyneConfig{}, trunc),
            doctest::Contains("truncation"), std::runtime_error);
    }
    SUBCASE("density matrix too small for the requested order") {
        SystemParams p = weak_params(0.2);
        TruncationConfig trunc;
        trunc.n_max = 3;
        const auto dens = liouvillian_steady_state(p, HomodyneConfig{}, trunc);
        CHECK_THROWS_AS(moments_from_density(dens, p, 4),
                        std::invalid_argument);
    }
    SUBCASE("correlation order needs twice the moment order") {
        const auto table = solve_recursive(weak_params(0.2), 2);
        CHECK_THROWS_AS(gN_from_moments(table, 2), std::invalid_argument);
        CHECK_NOTHROW(gN_from_moments(table, 1));
    }
    SUBCASE("missing entry lookup") {
        const auto table = solve_recursive(weak_params(0.2), 2);
        const MomentIndex absent{1, 1, 1, 1};
        CHECK_THROWS_AS(table.at(absent), std::out_of_range);
    }
}
