#include <doctest.h>

#include <cmath>
#include <numbers>

#include "jcnoise/errors.hpp"
#include "jcnoise/field_states.hpp"
#include "jcnoise/jc_dynamics.hpp"
#include "jcnoise/observables.hpp"

using namespace jcnoise;

namespace {

const Complex kAlpha10{std::sqrt(10.0), 0.0};

// Resonant evolution of |e> (x) sum_n c_n |n> as a state vector, written out
// independently of the density-matrix propagator. The top Fock level has no
// partner and stays put.
ComplexVector evolve_pure(const ComplexVector& c, double t) {
    const Eigen::Index n = c.size();
    ComplexVector psi = ComplexVector::Zero(2 * n);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double w = std::sqrt(static_cast<double>(k + 1)) * t;
        psi(k) += c(k) * std::cos(w);
        psi(n + k + 1) += c(k) * std::sin(w);
    }
    psi(n - 1) += c(n - 1);
    return psi;
}

} // namespace

TEST_CASE("population inversion") {
    const FieldState d = truncate_field(displaced_thermal(kAlpha10, 1.0), 40);
    CHECK(population_inversion(initial_joint_state(d)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(population_inversion(evolve_analytic(number_state(0, 4), std::numbers::pi / 2.0)) ==
          doctest::Approx(-1.0).epsilon(1e-9));

    JointState mixed;
    mixed.field_dim = d.cutoff();
    const auto n = static_cast<Eigen::Index>(d.cutoff());
    mixed.rho = ComplexMatrix::Zero(2 * n, 2 * n);
    mixed.rho.topLeftCorner(n, n) = 0.5 * d.rho;
    mixed.rho.bottomRightCorner(n, n) = 0.5 * d.rho;
    CHECK(std::abs(population_inversion(mixed)) < 1e-15);
}

TEST_CASE("negativity examples") {
    const double q = equal_overlap_q(kAlpha10, 1.0);
    for (const FieldState& f : {truncate_field(coherent_state(kAlpha10), 60),
                                truncate_field(mtcs(kAlpha10, 1.0, q), 60),
                                truncate_field(photon_add(displaced_thermal(kAlpha10, 1.0)), 60)}) {
        CHECK(negativity(initial_joint_state(f)) <= 1e-10);
    }

    JointState bell;
    bell.field_dim = 2;
    ComplexVector psi = ComplexVector::Zero(4);
    psi(0) = 1.0 / std::sqrt(2.0);
    psi(3) = -1.0 / std::sqrt(2.0);
    bell.rho = psi * psi.adjoint();
    CHECK(std::abs(negativity(bell) - 0.5) <= 1e-9);
    CHECK(std::abs(pure_state_negativity(psi, 2) - 0.5) <= 1e-12);

    const JointState quarter = evolve_analytic(number_state(0, 4), std::numbers::pi / 4.0);
    CHECK(std::abs(negativity(quarter) - 0.5) <= 1e-8);
}

TEST_CASE("spectral and Schmidt negativity agree for a coherent field") {
    const FieldState coh = truncate_field(coherent_state(kAlpha10), 60);
    const ComplexVector c = coherent_amplitudes(kAlpha10, 60).normalized();
    for (const double t : {0.5, 2.0, 7.0, 19.9, 25.0}) {
        CAPTURE(t);
        const double spectral = negativity(evolve_analytic(coh, t));
        const double schmidt = pure_state_negativity(evolve_pure(c, t), 60);
        CHECK(std::abs(spectral - schmidt) <= 1e-8);
    }
    CHECK_THROWS_AS(pure_state_negativity(c, 60), DimensionMismatch);
}

TEST_CASE("time series basics") {
    const FieldState vac = number_state(0, 4);
    const std::vector<double> zero{0.0};
    const TimeSeries one = time_series(vac, zero);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].lambda_t == 0.0);
    CHECK(one.rows[0].inversion == doctest::Approx(1.0));
    CHECK(one.rows[0].negativity == 0.0);

    const auto grid = uniform_grid(kDefaultTMax, kDefaultSteps);
    CHECK(grid.size() == 2001);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 25.0);
    const TimeSeries s = time_series(vac, grid, Propagator::numeric);
    double worst = 0.0;
    for (const SeriesRow& r : s.rows) {
        worst = std::max(worst, std::abs(r.inversion - std::cos(2.0 * r.lambda_t)));
    }
    CHECK(worst <= 1e-8);

    const std::vector<double> backwards{1.0, 0.5};
    CHECK_THROWS_AS(time_series(vac, backwards), DomainError);
    CHECK_THROWS_AS(uniform_grid(0.0, 5), DomainError);
}

TEST_CASE("coherent field collapses and revives near 2 pi sqrt(10)") {
    const FieldState coh = displaced_thermal(kAlpha10, 0.0);
    const auto grid = uniform_grid(kDefaultTMax, kDefaultSteps);
    const auto w = inversion_series(coh, grid);
    double collapse = 0.0;
    double peak = 0.0;
    double peak_t = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= 6.0 && grid[i] <= 12.0) {
            collapse = std::max(collapse, std::abs(w[i]));
        }
        if (grid[i] >= 12.0 && std::abs(w[i]) > peak) {
            peak = std::abs(w[i]);
            peak_t = grid[i];
        }
    }
    CHECK(collapse < 0.15);
    CHECK(peak > 0.3);
    CHECK(std::abs(peak_t - 2.0 * std::numbers::pi * std::sqrt(10.0)) < 1.5);
}

TEST_CASE("time series is independent of the worker count") {
    const FieldState m = truncate_field(mtcs(kAlpha10, 1.0, equal_overlap_q(kAlpha10, 1.0)), 60);
    const auto grid = uniform_grid(25.0, 24);
    const TimeSeries a = time_series(m, grid, Propagator::analytic, {}, 1);
    const TimeSeries b = time_series(m, grid, Propagator::analytic, {}, 3);
    const TimeSeries c = time_series(m, grid, Propagator::analytic, {}, 0);
    REQUIRE(a.rows.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(a.rows[i].lambda_t == grid[i]);
        CHECK(a.rows[i].inversion == b.rows[i].inversion);
        CHECK(a.rows[i].negativity == b.rows[i].negativity);
        CHECK(a.rows[i].negativity == c.rows[i].negativity);
    }
}

TEST_CASE("observables are invariant under a global phase of alpha") {
    const Complex rotated = kAlpha10 * std::polar(1.0, std::numbers::pi / 3.0);
    const FieldState a = truncate_field(displaced_thermal(kAlpha10, 0.5), 60);
    const FieldState b = truncate_field(displaced_thermal(rotated, 0.5), 60);
    const auto grid = uniform_grid(25.0, 12);
    const TimeSeries sa = time_series(a, grid);
    const TimeSeries sb = time_series(b, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(sa.rows[i].inversion - sb.rows[i].inversion) <= 1e-8);
        CHECK(std::abs(sa.rows[i].negativity - sb.rows[i].negativity) <= 1e-8);
    }
}

TEST_CASE("clamp policy never hides a real negative eigenvalue") {
    const double q = equal_overlap_q(kAlpha10, 1.0);
    const FieldState d = displaced_thermal(kAlpha10, 1.0);
    const FieldState m = mtcs(kAlpha10, 1.0, q);
    for (const FieldState& f : {truncate_field(d, 60), truncate_field(m, 60),
                                truncate_field(photon_add(m), 60)}) {
        for (const double t : {3.0, 11.0, 20.0}) {
            const JointState s = evolve_analytic(f, t);
            CHECK(std::abs(negativity(s, 1e-10) - negativity(s, 1e-12)) <= 1e-8);
            CHECK(negativity(s) >= 0.0);
        }
    }
}

TEST_CASE("revival contrast") {
    const auto grid = uniform_grid(10.0, 1001);
    const std::vector<double> zeros(grid.size(), 0.0);
    CHECK(revival_contrast(grid, zeros, 2.0, 8.0) == 0.0);

    std::vector<double> rabi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rabi[i] = std::cos(2.0 * grid[i]);
    }
    CHECK(revival_contrast(grid, rabi, 1.0, 1.0 + std::numbers::pi) ==
          doctest::Approx(1.0).epsilon(1e-3));

    TimeSeries series;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        series.rows.push_back({grid[i], rabi[i], 0.0});
    }
    CHECK(revival_contrast(series, 1.0, 1.0 + std::numbers::pi) ==
          revival_contrast(grid, rabi, 1.0, 1.0 + std::numbers::pi));

    CHECK_THROWS_AS(revival_contrast(grid, rabi, 5.0, 5.05), EmptyWindow);
    CHECK_THROWS_AS(revival_contrast(grid, rabi, 5.0, 12.0), DomainError);
    CHECK_THROWS_AS(revival_contrast(grid, std::vector<double>(3, 0.0), 1.0, 2.0), DimensionMismatch);
}
