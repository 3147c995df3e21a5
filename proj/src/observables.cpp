#include "jcnoise/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "jcnoise/errors.hpp"

namespace jcnoise {

namespace {

constexpr std::size_t kMinWindowRows = 10;

void require_grid(std::span<const double> grid) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || grid[i] < 0.0) {
            throw DomainError("time grid must be finite and nonnegative");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw DomainError("time grid must be strictly increasing");
        }
    }
}

JointState evolve(const FieldState& field, const JointState& initial, double lambda_t,
                  Propagator propagator, const JCParams& params, RabiIndexing indexing) {
    if (propagator == Propagator::analytic) {
        return evolve_analytic(field, lambda_t, params, indexing);
    }
    return evolve_numeric(initial, params, lambda_t);
}

// Runs body(i) for i in [0, count) over a small pool. The first exception
// thrown by any worker is rethrown after all workers join.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body body) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next = count;
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace

double population_inversion(const JointState& state) {
    const auto n = static_cast<Eigen::Index>(state.field_dim);
    double excited = 0.0;
    double ground = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        excited += state.rho(kExcited * n + k, kExcited * n + k).real();
        ground += state.rho(kGround * n + k, kGround * n + k).real();
    }
    return excited - ground;
}

double negativity(const JointState& state, double clamp) {
    const ComplexMatrix pt = partial_transpose_atom(state.rho, state.field_dim);
    const RealVector ev = hermitian_eigenvalues(pt, 1e-8);
    double total = 0.0;
    for (const double v : ev) {
        if (v <= -clamp) {
            total -= v;
        }
    }
    return total;
}

double pure_state_negativity(const ComplexVector& psi, std::size_t field_dim) {
    const auto n = static_cast<Eigen::Index>(field_dim);
    if (psi.size() != 2 * n) {
        throw DimensionMismatch("pure_state_negativity: vector length must be 2 * field_dim");
    }
    // Rows are atom levels, columns field levels.
    ComplexMatrix coeffs(2, n);
    coeffs.row(0) = psi.segment(kExcited * n, n).transpose();
    coeffs.row(1) = psi.segment(kGround * n, n).transpose();
    // Singular values of the 2 x N coefficient matrix are the Schmidt
    // coefficients; those are the square roots of the 2 x 2 Gram eigenvalues.
    const ComplexMatrix gram = coeffs * coeffs.adjoint();
    const RealVector ev = hermitian_eigenvalues(gram, 1e-10);
    const double s1 = std::sqrt(std::max(0.0, ev(0)));
    const double s2 = std::sqrt(std::max(0.0, ev(1)));
    return s1 * s2;
}

std::vector<double> uniform_grid(double t_max, std::size_t steps) {
    if (steps == 0 || !std::isfinite(t_max) || t_max < 0.0) {
        throw DomainError("uniform_grid: need steps >= 1 and finite t_max >= 0");
    }
    if (steps == 1) {
        return {0.0};
    }
    if (t_max == 0.0) {
        throw DomainError("uniform_grid: t_max must be positive when steps > 1");
    }
    std::vector<double> grid(steps);
    const double denom = static_cast<double>(steps - 1);
    for (std::size_t i = 0; i < steps; ++i) {
        grid[i] = t_max * static_cast<double>(i) / denom;
    }
    return grid;
}

TimeSeries time_series(const FieldState& field, std::span<const double> grid,
                       Propagator propagator, const JCParams& params, unsigned workers) {
    require_grid(grid);
    const JointState initial = initial_joint_state(field);
    TimeSeries out;
    out.rows.resize(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        const JointState state =
            evolve(field, initial, grid[i], propagator, params, RabiIndexing::shifted);
        out.rows[i] = SeriesRow{grid[i], population_inversion(state), negativity(state)};
    });
    return out;
}

std::vector<double> inversion_series(const FieldState& field, std::span<const double> grid,
                                     Propagator propagator, const JCParams& params,
                                     RabiIndexing indexing) {
    require_grid(grid);
    const JointState initial = initial_joint_state(field);
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i] = population_inversion(evolve(field, initial, grid[i], propagator, params, indexing));
    }
    return out;
}

double revival_contrast(std::span<const double> grid, std::span<const double> inversion,
                        double t_lo, double t_hi) {
    if (grid.size() != inversion.size()) {
        throw DimensionMismatch("revival_contrast: grid and inversion lengths differ");
    }
    if (grid.empty() || t_lo > t_hi || t_lo < grid.front() || t_hi > grid.back()) {
        throw DomainError("revival_contrast: window must lie within the series range");
    }
    double best = 0.0;
    std::size_t rows = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= t_lo && grid[i] <= t_hi) {
            best = std::max(best, std::abs(inversion[i]));
            ++rows;
        }
    }
    if (rows < kMinWindowRows) {
        throw EmptyWindow("revival_contrast: window holds fewer than 10 rows");
    }
    return best;
}

double revival_contrast(const TimeSeries& series, double t_lo, double t_hi) {
    std::vector<double> grid;
    std::vector<double> inversion;
    grid.reserve(series.rows.size());
    inversion.reserve(series.rows.size());
    for (const auto& row : series.rows) {
        grid.push_back(row.lambda_t);
        inversion.push_back(row.inversion);
    }
    return revival_contrast(grid, inversion, t_lo, t_hi);
}

} // namespace jcnoise
