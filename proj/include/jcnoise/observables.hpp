#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "jcnoise/field_states.hpp"
#include "jcnoise/jc_dynamics.hpp"

namespace jcnoise {

/// Eigenvalues of the partial transpose in (-clamp, 0) are treated as zero.
inline constexpr double kNegativityClamp = 1e-10;

struct SeriesRow {
    double lambda_t = 0.0;
    double inversion = 0.0;
    double negativity = 0.0;
};

struct TimeSeries {
    std::vector<SeriesRow> rows;
};

enum class Propagator { analytic, numeric };

/// P(e) - P(g).
double population_inversion(const JointState& state);

/// Sum of |negative eigenvalues| of the atom-partial-transposed state.
double negativity(const JointState& state, double clamp = kNegativityClamp);

/// Negativity of a pure atom (x) field vector (atom-major) from its Schmidt
/// coefficients s1, s2: N = s1 * s2. Independent of the spectral route.
double pure_state_negativity(const ComplexVector& psi, std::size_t field_dim);

/// `steps` equally spaced points on [0, t_max].
std::vector<double> uniform_grid(double t_max, std::size_t steps);

/// One row per grid point; rows are computed independently and may be
/// spread over `workers` threads (0 picks the hardware concurrency). Output
/// order and values do not depend on the worker count.
TimeSeries time_series(const FieldState& field, std::span<const double> grid,
                       Propagator propagator = Propagator::analytic,
                       const JCParams& params = {}, unsigned workers = 0);

/// Inversion column only; skips the eigendecompositions.
std::vector<double> inversion_series(const FieldState& field, std::span<const double> grid,
                                     Propagator propagator = Propagator::analytic,
                                     const JCParams& params = {},
                                     RabiIndexing indexing = RabiIndexing::shifted);

/// max |inversion| over grid points inside [t_lo, t_hi].
double revival_contrast(std::span<const double> grid, std::span<const double> inversion,
                        double t_lo, double t_hi);
double revival_contrast(const TimeSeries& series, double t_lo, double t_hi);

inline constexpr double kDefaultTMax = 25.0;
inline constexpr std::size_t kDefaultSteps = 2001;
inline constexpr double kRevivalWindowLo = 15.0;
inline constexpr double kRevivalWindowHi = 25.0;

} // namespace jcnoise
