#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace jcnoise {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigenpairs of a Hermitian matrix. Eigenvalues ascend; eigenvector k is
/// column k of `vectors`.
struct Spectrum {
    RealVector values;
    ComplexMatrix vectors;
};

/// Largest entry magnitude, the norm used by every tolerance in the library.
double max_abs(const ComplexMatrix& m);

/// max |M - M^H|.
double hermiticity_error(const ComplexMatrix& m);

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what);

Spectrum hermitian_eigendecomposition(const ComplexMatrix& m, double hermiticity_tol = 1e-10);

/// Eigenvalues only, ascending. Same preconditions and errors as
/// hermitian_eigendecomposition, roughly three times cheaper.
RealVector hermitian_eigenvalues(const ComplexMatrix& m, double hermiticity_tol = 1e-10);

/// exp(M) by scaling and squaring with a degree-13 Pade approximant.
ComplexMatrix matrix_exponential(const ComplexMatrix& m);

/// Transposes the atom index of an atom (x) field operator stored atom-major:
/// row index = a * field_dim + n with a = 0 for |e>, 1 for |g>.
ComplexMatrix partial_transpose_atom(const ComplexMatrix& joint, std::size_t field_dim);

/// Associated Laguerre polynomial L_m^{(k)}(x) by forward recurrence in m.
/// Requires 0 <= m <= 400 and k >= -m.
double laguerre(int m, int k, double x);

/// L_0^{(k)}(x) ... L_max_m^{(k)}(x) in one recurrence sweep.
std::vector<double> laguerre_sequence(int max_m, int k, double x);

} // namespace jcnoise
