#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "jcnoise/numerics.hpp"

namespace jcnoise {

/// Probability mass above the cutoff that a constructor accepts.
inline constexpr double kTailBound = 1e-10;

/// Mixture sums stop once the neglected weight falls below this.
inline constexpr double kMixtureTruncation = 1e-12;

inline constexpr std::size_t kDefaultCutoff = 150;

enum class StateKind { number, coherent, thermal, dts, mtcs, pacs };

std::string to_string(StateKind kind);

enum class DtsMethod { unitary, displaced_number, pacs_mixture };

/// Parameters shared by every field state. `q` is the weight of the coherent
/// projector in a mixed thermal-coherent state; `order` is the photon number
/// of a number state or the order of a photon-added coherent state.
struct FieldParams {
    Complex alpha{0.0, 0.0};
    double nbar = 0.0;
    double q = 1.0;
    std::size_t cutoff = kDefaultCutoff;
    int order = 0;

    double alpha_sq() const { return std::norm(alpha); }
    double theta() const { return std::arg(alpha); }
    /// 1 / (1 + nbar).
    double epsilon() const { return 1.0 / (1.0 + nbar); }
    /// ln(1 + 1/nbar); requires nbar > 0.
    double gamma() const;
    /// alpha / (1 + nbar), the amplitude of the photon-added components of a
    /// displaced thermal state.
    Complex tilde_alpha() const { return alpha * epsilon(); }
    /// nbar / (1 + nbar), the thermal geometric ratio.
    double thermal_ratio() const { return nbar / (1.0 + nbar); }

    void validate() const;
};

/// A field density matrix on a truncated Fock space with its construction
/// metadata. `photons_added` counts applications of the photon-addition map.
struct FieldState {
    ComplexMatrix rho;
    FieldParams params;
    StateKind kind = StateKind::number;
    int photons_added = 0;
    double tail_mass = 0.0;

    std::size_t cutoff() const { return static_cast<std::size_t>(rho.rows()); }
    /// e.g. "dts", "photon_added(mtcs)".
    std::string kind_name() const;
};

/// Throws DomainError unless the state is Hermitian within 1e-12, has unit
/// trace within 1e-10, and no eigenvalue below -1e-10.
void check_state_invariants(const FieldState& state);

/// Amplitudes exp(-|alpha|^2/2) alpha^n / sqrt(n!) for n < cutoff, without
/// renormalization.
ComplexVector coherent_amplitudes(Complex alpha, std::size_t cutoff);

FieldState number_state(int n, std::size_t cutoff);
FieldState coherent_state(Complex alpha, std::size_t cutoff = kDefaultCutoff);
FieldState thermal_state(double nbar, std::size_t cutoff = kDefaultCutoff);

/// Matrix of D(alpha) = exp(alpha a^dag - alpha^* a) restricted to the first
/// `cutoff` Fock states, from the closed-form Laguerre matrix elements.
ComplexMatrix displacement_operator(Complex alpha, std::size_t cutoff = kDefaultCutoff);

FieldState displaced_thermal(Complex alpha, double nbar, std::size_t cutoff = kDefaultCutoff,
                             DtsMethod method = DtsMethod::unitary);

/// (1 - q) thermal + q |alpha><alpha|.
FieldState mtcs(Complex alpha, double nbar, double q, std::size_t cutoff = kDefaultCutoff);

/// Photon-added coherent state a^dag^m |alpha>, normalized.
FieldState pacs(Complex alpha, int m, std::size_t cutoff = kDefaultCutoff);

/// Tr(a^dag rho a) evaluated on the truncated matrix.
double photon_add_normalizer(const FieldState& state);

/// rho -> a^dag rho a / Tr(a^dag rho a).
FieldState photon_add(const FieldState& state);

/// Leading dim x dim block of rho, renormalized. Never throws on tail mass:
/// the discarded probability is added to tail_mass. Used to run dynamics on a
/// deliberately small space.
FieldState truncate_field(const FieldState& state, std::size_t dim);

/// Mixing weight giving the MTCS the same coherent-state overlap as the DTS.
double equal_overlap_q(Complex alpha, double nbar);

/// <alpha| rho |alpha>.
double coherent_overlap(const FieldState& state, Complex alpha);

/// 1 - Tr(rho^2).
double purity_deficit(const FieldState& state);

double mean_photon_number(const FieldState& state);

/// Diagonal of rho; entry n is P(n).
std::vector<double> photon_distribution(const FieldState& state);

/// Indices n where P(n) is strictly larger than both neighbours (a missing
/// neighbour counts as -inf), plateaus below `flat_tol` ignored.
std::vector<std::size_t> local_maxima(const std::vector<double>& distribution,
                                      double flat_tol = 1e-15);

/// Closed-form <n|rho|m> for the DTS and MTCS (kind must be dts or mtcs).
Complex closed_form_element(StateKind kind, std::size_t n, std::size_t m,
                            const FieldParams& params);

/// Weights of the photon-added-coherent-state mixture that reproduces the
/// DTS, truncated once the neglected weight drops below kMixtureTruncation.
/// Weights sum to one before truncation.
std::vector<double> pacs_mixture_weights(Complex alpha, double nbar);

} // namespace jcnoise
