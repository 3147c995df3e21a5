#include "jcnoise/jc_dynamics.hpp"

#include <cmath>
#include <string>

#include "jcnoise/errors.hpp"

namespace jcnoise {

void JCParams::validate() const {
    if (!(coupling > 0.0) || !std::isfinite(coupling)) {
        throw DomainError("JCParams: coupling must be positive and finite");
    }
    if (!std::isfinite(detuning)) {
        throw DomainError("JCParams: detuning must be finite");
    }
}

JointState initial_joint_state(const FieldState& field) {
    const auto n = field.rho.rows();
    JointState out;
    out.field_dim = static_cast<std::size_t>(n);
    out.rho = ComplexMatrix::Zero(2 * n, 2 * n);
    out.rho.topLeftCorner(n, n) = field.rho;
    return out;
}

ComplexMatrix build_hamiltonian(const JCParams& params, std::size_t field_dim) {
    params.validate();
    if (field_dim < 2) {
        throw DimensionMismatch("build_hamiltonian: field_dim must be at least 2");
    }
    const auto n = static_cast<Eigen::Index>(field_dim);
    ComplexMatrix h = ComplexMatrix::Zero(2 * n, 2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        h(kExcited * n + k, kExcited * n + k) = 0.5 * params.detuning;
        h(kGround * n + k, kGround * n + k) = -0.5 * params.detuning;
    }
    // H|e,k> = i lambda sqrt(k+1) |g,k+1>, H|g,k+1> = -i lambda sqrt(k+1) |e,k>.
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double g = params.coupling * std::sqrt(static_cast<double>(k + 1));
        h(kGround * n + k + 1, kExcited * n + k) = Complex(0.0, g);
        h(kExcited * n + k, kGround * n + k + 1) = Complex(0.0, -g);
    }
    return h;
}

JointState evolve_analytic(const FieldState& field, double lambda_t, const JCParams& params,
                           RabiIndexing indexing) {
    params.validate();
    if (params.detuning != 0.0) {
        throw ResonantOnly("evolve_analytic: closed form exists only for zero detuning");
    }
    if (!(lambda_t >= 0.0) || !std::isfinite(lambda_t)) {
        throw DomainError("evolve_analytic: lambda_t must be finite and nonnegative");
    }
    const auto n = field.rho.rows();
    // Each |e,k> rotates into cos|e,k> + sin|g,k+1>; the top level has no
    // partner inside the truncation.
    RealVector c(n);
    RealVector s(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double level = indexing == RabiIndexing::shifted ? static_cast<double>(k + 1)
                                                               : static_cast<double>(k);
        const double angle = lambda_t * std::sqrt(level);
        const bool coupled = k + 1 < n;
        c(k) = coupled ? std::cos(angle) : 1.0;
        s(k) = coupled ? std::sin(angle) : 0.0;
    }
    const ComplexMatrix& f = field.rho;
    JointState out;
    out.field_dim = static_cast<std::size_t>(n);
    out.rho = ComplexMatrix::Zero(2 * n, 2 * n);
    const auto cd = c.cast<Complex>().asDiagonal();
    const auto sd = s.cast<Complex>().asDiagonal();
    // Ground-block rows/columns are shifted up by one photon.
    const Eigen::Index m = n - 1;
    out.rho.block(kExcited * n, kExcited * n, n, n) = cd * f * cd;
    const ComplexMatrix ge = (sd * f * cd).topRows(m);
    out.rho.block(kGround * n + 1, kExcited * n, m, n) = ge;
    out.rho.block(kExcited * n, kGround * n + 1, n, m) = ge.adjoint();
    out.rho.block(kGround * n + 1, kGround * n + 1, m, m) = (sd * f * sd).topLeftCorner(m, m);
    return out;
}

JointState evolve_numeric(const JointState& initial, const JCParams& params, double lambda_t) {
    params.validate();
    if (!(lambda_t >= 0.0) || !std::isfinite(lambda_t)) {
        throw DomainError("evolve_numeric: lambda_t must be finite and nonnegative");
    }
    const ComplexMatrix h = build_hamiltonian(params, initial.field_dim);
    const double t = lambda_t / params.coupling;
    const ComplexMatrix u = matrix_exponential(Complex(0.0, -t) * h);
    JointState out;
    out.field_dim = initial.field_dim;
    out.rho = u * initial.rho * u.adjoint();
    return out;
}

ComplexMatrix reduced_field(const JointState& state) {
    const auto n = static_cast<Eigen::Index>(state.field_dim);
    return state.rho.block(kExcited * n, kExcited * n, n, n) +
           state.rho.block(kGround * n, kGround * n, n, n);
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("trace_distance: operands differ in shape");
    }
    const ComplexMatrix diff = a - b;
    const RealVector ev = hermitian_eigenvalues(0.5 * (diff + diff.adjoint()), 1e-8);
    return 0.5 * ev.cwiseAbs().sum();
}

double excitation_number(const JointState& state) {
    const auto n = static_cast<Eigen::Index>(state.field_dim);
    double total = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        total += (static_cast<double>(k) + 1.0) * state.rho(kExcited * n + k, kExcited * n + k).real();
        total += static_cast<double>(k) * state.rho(kGround * n + k, kGround * n + k).real();
    }
    return total;
}

} // namespace jcnoise
