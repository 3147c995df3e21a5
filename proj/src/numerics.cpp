#include "jcnoise/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "jcnoise/errors.hpp"

namespace jcnoise {

namespace {

constexpr int kMaxLaguerreOrder = 400;

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw DimensionMismatch(std::string(what) + ": matrix must be square and non-empty");
    }
}

void require_hermitian(const ComplexMatrix& m, double tol) {
    require_square(m, "hermitian_eigendecomposition");
    require_finite(m, "hermitian_eigendecomposition");
    const double err = hermiticity_error(m);
    if (err > tol) {
        throw NotHermitian("matrix deviates from Hermitian by " + std::to_string(err));
    }
}

// Stable ascending order; ties keep solver order.
std::vector<Eigen::Index> ascending_order(const RealVector& values) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
    return order;
}

double one_norm(const ComplexMatrix& m) {
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

} // namespace

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_error(const ComplexMatrix& m) {
    return max_abs(m - m.adjoint());
}

void require_finite(const ComplexMatrix& m, const char* what) {
    if (!m.allFinite()) {
        throw NonFinite(std::string(what) + ": non-finite matrix entry");
    }
}

Spectrum hermitian_eigendecomposition(const ComplexMatrix& m, double hermiticity_tol) {
    require_hermitian(m, hermiticity_tol);
    // Symmetrize so the solver sees an exactly Hermitian input regardless of
    // which triangle it reads.
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NoConvergence("Hermitian eigensolver did not converge");
    }
    const auto order = ascending_order(solver.eigenvalues());
    Spectrum out;
    out.values.resize(h.rows());
    out.vectors.resize(h.rows(), h.cols());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        out.values(idx) = solver.eigenvalues()(order[i]);
        out.vectors.col(idx) = solver.eigenvectors().col(order[i]);
    }
    return out;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m, double hermiticity_tol) {
    require_hermitian(m, hermiticity_tol);
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NoConvergence("Hermitian eigensolver did not converge");
    }
    RealVector values = solver.eigenvalues();
    std::stable_sort(values.begin(), values.end());
    return values;
}

ComplexMatrix matrix_exponential(const ComplexMatrix& m) {
    require_square(m, "matrix_exponential");
    require_finite(m, "matrix_exponential");

    // Higham (2005) degree-13 coefficients and scaling threshold.
    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const auto n = m.rows();
    const double norm = one_norm(m);
    if (norm == 0.0) {
        // The Pade quotient of zero is I only up to rounding of b[0]/b[0].
        return ComplexMatrix::Identity(n, n);
    }
    int squarings = 0;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    }
    const ComplexMatrix a = m * std::ldexp(1.0, -squarings);
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a4 * a2;

    const ComplexMatrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                                  b[5] * a4 + b[3] * a2 + b[1] * id;
    const ComplexMatrix u = a * u_inner;
    const ComplexMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                            b[4] * a4 + b[2] * a2 + b[0] * id;

    ComplexMatrix r = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) {
        r = r * r;
    }
    require_finite(r, "matrix_exponential result");
    return r;
}

ComplexMatrix partial_transpose_atom(const ComplexMatrix& joint, std::size_t field_dim) {
    const auto n = static_cast<Eigen::Index>(field_dim);
    if (field_dim == 0 || joint.rows() != 2 * n || joint.cols() != 2 * n) {
        throw DimensionMismatch("partial_transpose_atom: joint dimension must be 2 * field_dim");
    }
    ComplexMatrix out(2 * n, 2 * n);
    for (Eigen::Index a = 0; a < 2; ++a) {
        for (Eigen::Index b = 0; b < 2; ++b) {
            // Block (a, b) of the result is block (b, a) of the input.
            out.block(a * n, b * n, n, n) = joint.block(b * n, a * n, n, n);
        }
    }
    return out;
}

std::vector<double> laguerre_sequence(int max_m, int k, double x) {
    if (max_m < 0 || max_m > kMaxLaguerreOrder) {
        throw DomainError("laguerre: order must lie in [0, 400]");
    }
    if (k < -max_m) {
        throw DomainError("laguerre: associated index k must satisfy k >= -m");
    }
    if (!std::isfinite(x)) {
        throw DomainError("laguerre: argument must be finite");
    }
    std::vector<double> out(static_cast<std::size_t>(max_m) + 1);
    out[0] = 1.0;
    if (max_m >= 1) {
        out[1] = 1.0 + k - x;
    }
    for (int n = 1; n < max_m; ++n) {
        const auto i = static_cast<std::size_t>(n);
        out[i + 1] = ((2.0 * n + 1.0 + k - x) * out[i] - (n + k) * out[i - 1]) / (n + 1.0);
    }
    return out;
}

double laguerre(int m, int k, double x) {
    if (m < 0) {
        throw DomainError("laguerre: order must be nonnegative");
    }
    return laguerre_sequence(m, k, x).back();
}

} // namespace jcnoise
