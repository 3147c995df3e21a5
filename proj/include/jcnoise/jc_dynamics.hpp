#pragma once

#include <cstddef>

#include "jcnoise/field_states.hpp"
#include "jcnoise/numerics.hpp"

namespace jcnoise {

/// Atom-field coupling and detuning, hbar = 1. Time always enters as the
/// dimensionless product lambda * t.
struct JCParams {
    double coupling = 1.0;
    double detuning = 0.0;

    void validate() const;
};

/// Atom (x) field density matrix of dimension 2 * field_dim, atom-major:
/// index a * field_dim + n with a = 0 for |e>, a = 1 for |g>.
struct JointState {
    ComplexMatrix rho;
    std::size_t field_dim = 0;
};

inline constexpr Eigen::Index kExcited = 0;
inline constexpr Eigen::Index kGround = 1;

/// |e><e| (x) rho_field.
JointState initial_joint_state(const FieldState& field);

/// Interaction-picture Hamiltonian (Delta/2) sigma_z + i lambda (a^dag sigma_- - a sigma_+)
/// on the truncated joint space.
ComplexMatrix build_hamiltonian(const JCParams& params, std::size_t field_dim);

/// Which Rabi frequency couples |e,n> and |g,n+1>. `shifted` is the physical
/// lambda sqrt(n+1); `unshifted` uses lambda sqrt(n) and exists only so the
/// verification harness can demonstrate that the vacuum Rabi check rejects it.
enum class RabiIndexing { shifted, unshifted };

/// Closed-form resonant evolution. In the truncated model |e,N-1> has no
/// partner state and stays frozen, matching evolve_numeric on the same space.
JointState evolve_analytic(const FieldState& field, double lambda_t, const JCParams& params = {},
                           RabiIndexing indexing = RabiIndexing::shifted);

/// U rho U^dag with U = exp(-i H t), any detuning.
JointState evolve_numeric(const JointState& initial, const JCParams& params, double lambda_t);

/// Trace over the atom.
ComplexMatrix reduced_field(const JointState& state);

/// Half the trace norm of the difference.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Tr[rho (n + |e><e|)], conserved by the resonant interaction.
double excitation_number(const JointState& state);

} // namespace jcnoise
