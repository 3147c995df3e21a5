#include "jcnoise/field_states.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "jcnoise/errors.hpp"

namespace jcnoise {

namespace {

constexpr std::size_t kMaxSuggestedCutoff = 5000;
constexpr int kMaxMixtureTerms = 400;
constexpr std::size_t kMaxRecursionCutoff = 350;

double log_factorial(std::size_t n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

// exp(log_magnitude) * e^{i phase}, zero when the magnitude underflows.
Complex polar_from_log(double log_magnitude, double phase) {
    if (log_magnitude < -745.0) {
        return {0.0, 0.0};
    }
    return std::polar(std::exp(log_magnitude), phase);
}

void require_cutoff(std::size_t cutoff, const char* what) {
    if (cutoff < 2) {
        throw DomainError(std::string(what) + ": cutoff must be at least 2");
    }
}

void require_finite_alpha(Complex alpha, const char* what) {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw DomainError(std::string(what) + ": alpha must be finite");
    }
}

void require_nbar(double nbar, const char* what) {
    if (!std::isfinite(nbar) || nbar < 0.0) {
        throw DomainError(std::string(what) + ": nbar must be finite and nonnegative");
    }
}

std::size_t suggest_cutoff(const std::function<double(std::size_t)>& tail_at, std::size_t from) {
    std::size_t n = std::max<std::size_t>(from, 2);
    while (n < kMaxSuggestedCutoff && tail_at(n) > kTailBound) {
        n += std::max<std::size_t>(10, n / 4);
    }
    return std::min(n, kMaxSuggestedCutoff);
}

[[noreturn]] void throw_cutoff(const std::string& what, double tail, std::size_t suggested) {
    throw CutoffTooSmall(what + ": probability mass " + std::to_string(tail) +
                             " lies above the cutoff; try --cutoff " + std::to_string(suggested),
                         tail, suggested);
}

double poisson_tail(double mean, std::size_t cutoff) {
    if (mean == 0.0) {
        return 0.0;
    }
    double inside = 0.0;
    const double log_mean = std::log(mean);
    for (std::size_t n = 0; n < cutoff; ++n) {
        inside += std::exp(-mean + static_cast<double>(n) * log_mean - log_factorial(n));
    }
    return std::max(0.0, 1.0 - inside);
}

double geometric_tail(double nbar, std::size_t cutoff) {
    if (nbar == 0.0) {
        return 0.0;
    }
    return std::pow(nbar / (1.0 + nbar), static_cast<double>(cutoff));
}

// Number of geometric terms (ratio x) needed before the neglected weight
// x^K drops below kMixtureTruncation.
std::size_t geometric_terms(double ratio) {
    if (ratio <= 0.0) {
        return 1;
    }
    return static_cast<std::size_t>(std::ceil(std::log(kMixtureTruncation) / std::log(ratio)));
}

// Displaced number states D(alpha)|k> for k < count, generated from
// D|k+1> = (a^dag - alpha^*) D|k> / sqrt(k+1). Entries below the cutoff are
// exact since the recursion never moves weight downward. The recursion is
// unstable: rounding error along D|j>, j > k, grows by about sqrt(N/k) per
// step, up to e^{N/2} overall. It therefore runs in 100-digit binary floating
// point, enough for cutoffs up to kMaxRecursionCutoff.
template <typename Visit>
void for_each_displaced_number(Complex alpha, std::size_t cutoff, std::size_t count, Visit visit) {
    using Big = boost::multiprecision::cpp_bin_float_100;
    if (cutoff > kMaxRecursionCutoff) {
        throw MethodDiverged("displaced-number recursion is limited to cutoff " +
                             std::to_string(kMaxRecursionCutoff));
    }
    const Big ar = alpha.real();
    const Big ai = alpha.imag();
    std::vector<Big> re(cutoff);
    std::vector<Big> im(cutoff);
    std::vector<Big> roots(cutoff + count + 1);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        roots[i] = boost::multiprecision::sqrt(Big(i));
    }
    // |alpha> with c_n = c_{n-1} alpha / sqrt(n).
    re[0] = boost::multiprecision::exp(-(ar * ar + ai * ai) / 2);
    im[0] = 0;
    for (std::size_t i = 1; i < cutoff; ++i) {
        re[i] = (re[i - 1] * ar - im[i - 1] * ai) / roots[i];
        im[i] = (re[i - 1] * ai + im[i - 1] * ar) / roots[i];
    }

    const auto n = static_cast<Eigen::Index>(cutoff);
    ComplexVector v(n);
    std::vector<Big> nre(cutoff);
    std::vector<Big> nim(cutoff);
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t i = 0; i < cutoff; ++i) {
            v(static_cast<Eigen::Index>(i)) = Complex(static_cast<double>(re[i]), static_cast<double>(im[i]));
        }
        visit(k, v);
        if (k + 1 == count) {
            break;
        }
        // next = (a^dag - alpha^*) v / sqrt(k+1); alpha^* v = (ar v_re + ai v_im, ar v_im - ai v_re).
        for (std::size_t i = 0; i < cutoff; ++i) {
            Big r = -(ar * re[i] + ai * im[i]);
            Big m = -(ar * im[i] - ai * re[i]);
            if (i > 0) {
                r += roots[i] * re[i - 1];
                m += roots[i] * im[i - 1];
            }
            nre[i] = r / roots[k + 1];
            nim[i] = m / roots[k + 1];
        }
        re.swap(nre);
        im.swap(nim);
    }
}

// Normalized a^dag^m |beta> amplitudes for indices below the cutoff, using
// the exact normalizer m! L_m(-|beta|^2).
ComplexVector pacs_amplitudes(Complex beta, int m, std::size_t cutoff) {
    const auto n = static_cast<Eigen::Index>(cutoff);
    ComplexVector out = ComplexVector::Zero(n);
    const auto order = static_cast<std::size_t>(m);
    const double b2 = std::norm(beta);
    const double log_norm = 0.5 * (log_factorial(order) + std::log(laguerre(m, 0, -b2)));
    if (b2 == 0.0) {
        if (order < cutoff) {
            out(static_cast<Eigen::Index>(order)) = 1.0;
        }
        return out;
    }
    const double log_b = 0.5 * std::log(b2);
    const double theta = std::arg(beta);
    for (std::size_t j = order; j < cutoff; ++j) {
        const std::size_t k = j - order;
        const double log_mag = -0.5 * b2 + static_cast<double>(k) * log_b +
                               0.5 * log_factorial(j) - log_factorial(k) - log_norm;
        out(static_cast<Eigen::Index>(j)) = polar_from_log(log_mag, static_cast<double>(k) * theta);
    }
    return out;
}

// Mass of the DTS photon distribution at or above `cutoff`, from the PACS
// mixture whose amplitudes are closed-form and stable at any cutoff. Past the
// mixture's reach (large nbar) the thermal tail stands in as an estimate.
double dts_tail(Complex alpha, double nbar, std::size_t cutoff) {
    std::vector<double> weights;
    try {
        weights = pacs_mixture_weights(alpha, nbar);
    } catch (const MethodDiverged&) {
        return geometric_tail(nbar, cutoff);
    }
    const Complex beta = alpha / (1.0 + nbar);
    double inside = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        inside += weights[m] * pacs_amplitudes(beta, static_cast<int>(m), cutoff).squaredNorm();
    }
    return std::max(0.0, 1.0 - inside);
}

double raw_trace(const ComplexMatrix& rho) {
    return rho.diagonal().real().sum();
}

// Divides by the trace and records the lost mass; throws when it exceeds the
// tail bound.
FieldState finish(ComplexMatrix rho, const FieldParams& params, StateKind kind,
                  const std::function<double(std::size_t)>& tail_at, const char* what) {
    const double trace = raw_trace(rho);
    const double tail = std::max(0.0, 1.0 - trace);
    if (tail > kTailBound) {
        throw_cutoff(what, tail, suggest_cutoff(tail_at, params.cutoff));
    }
    rho /= trace;
    // Restore exact Hermiticity lost to rounding in the products above.
    rho = 0.5 * (rho + rho.adjoint()).eval();
    FieldState out;
    out.rho = std::move(rho);
    out.params = params;
    out.kind = kind;
    out.tail_mass = tail;
    return out;
}

ComplexMatrix diagonal_matrix(const RealVector& d) {
    return d.cast<Complex>().asDiagonal();
}

} // namespace

std::string to_string(StateKind kind) {
    switch (kind) {
    case StateKind::number: return "number";
    case StateKind::coherent: return "coherent";
    case StateKind::thermal: return "thermal";
    case StateKind::dts: return "dts";
    case StateKind::mtcs: return "mtcs";
    case StateKind::pacs: return "pacs";
    }
    return "unknown";
}

double FieldParams::gamma() const {
    if (nbar <= 0.0) {
        throw DomainError("gamma = ln(1 + 1/nbar) requires nbar > 0");
    }
    return std::log1p(1.0 / nbar);
}

void FieldParams::validate() const {
    require_finite_alpha(alpha, "FieldParams");
    require_nbar(nbar, "FieldParams");
    if (!(q >= 0.0 && q <= 1.0)) {
        throw DomainError("FieldParams: q must lie in [0, 1]");
    }
    require_cutoff(cutoff, "FieldParams");
}

std::string FieldState::kind_name() const {
    std::string name = to_string(kind);
    for (int i = 0; i < photons_added; ++i) {
        name = "photon_added(" + name + ")";
    }
    return name;
}

void check_state_invariants(const FieldState& state) {
    const double herm = hermiticity_error(state.rho);
    if (herm > 1e-12) {
        throw DomainError("field state not Hermitian: " + std::to_string(herm));
    }
    const double trace_err = std::abs(raw_trace(state.rho) - 1.0);
    if (trace_err > 1e-10) {
        throw DomainError("field state trace off by " + std::to_string(trace_err));
    }
    const double min_eig = hermitian_eigenvalues(state.rho, 1e-12)(0);
    if (min_eig < -1e-10) {
        throw DomainError("field state has negative eigenvalue " + std::to_string(min_eig));
    }
}

ComplexVector coherent_amplitudes(Complex alpha, std::size_t cutoff) {
    require_finite_alpha(alpha, "coherent_amplitudes");
    const auto n = static_cast<Eigen::Index>(cutoff);
    ComplexVector out = ComplexVector::Zero(n);
    const double a2 = std::norm(alpha);
    if (a2 == 0.0) {
        out(0) = 1.0;
        return out;
    }
    const double log_a = 0.5 * std::log(a2);
    const double theta = std::arg(alpha);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double log_mag = -0.5 * a2 + static_cast<double>(k) * log_a - 0.5 * log_factorial(k);
        out(i) = polar_from_log(log_mag, static_cast<double>(k) * theta);
    }
    return out;
}

FieldState number_state(int n, std::size_t cutoff) {
    require_cutoff(cutoff, "number_state");
    if (n < 0) {
        throw DomainError("number_state: photon number must be nonnegative");
    }
    if (static_cast<std::size_t>(n) >= cutoff) {
        throw_cutoff("number_state", 1.0, static_cast<std::size_t>(n) + 1);
    }
    FieldState out;
    out.rho = ComplexMatrix::Zero(static_cast<Eigen::Index>(cutoff),
                                  static_cast<Eigen::Index>(cutoff));
    out.rho(n, n) = 1.0;
    out.params.cutoff = cutoff;
    out.params.order = n;
    out.params.q = 0.0;
    out.kind = StateKind::number;
    return out;
}

FieldState coherent_state(Complex alpha, std::size_t cutoff) {
    require_cutoff(cutoff, "coherent_state");
    const ComplexVector v = coherent_amplitudes(alpha, cutoff);
    const FieldParams params{alpha, 0.0, 1.0, cutoff, 0};
    const double mean = std::norm(alpha);
    return finish(v * v.adjoint(), params, StateKind::coherent,
                  [mean](std::size_t c) { return poisson_tail(mean, c); }, "coherent_state");
}

FieldState thermal_state(double nbar, std::size_t cutoff) {
    require_cutoff(cutoff, "thermal_state");
    require_nbar(nbar, "thermal_state");
    const FieldParams params{{0.0, 0.0}, nbar, 0.0, cutoff, 0};
    RealVector p(static_cast<Eigen::Index>(cutoff));
    const double ratio = params.thermal_ratio();
    double w = params.epsilon();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        p(i) = w;
        w *= ratio;
    }
    return finish(diagonal_matrix(p), params, StateKind::thermal,
                  [nbar](std::size_t c) { return geometric_tail(nbar, c); }, "thermal_state");
}

ComplexMatrix displacement_operator(Complex alpha, std::size_t cutoff) {
    require_cutoff(cutoff, "displacement_operator");
    require_finite_alpha(alpha, "displacement_operator");
    const double a2 = std::norm(alpha);
    if (a2 > static_cast<double>(cutoff) / 3.0) {
        const auto suggested = static_cast<std::size_t>(std::ceil(3.0 * a2));
        throw_cutoff("displacement_operator", 1.0, suggested);
    }
    const auto n = static_cast<Eigen::Index>(cutoff);
    if (a2 == 0.0) {
        return ComplexMatrix::Identity(n, n);
    }
    ComplexMatrix d(n, n);
    const double log_a = 0.5 * std::log(a2);
    const double theta = std::arg(alpha);
    const int max_order = static_cast<int>(cutoff) - 1;
    // <row|D|col> = sqrt(lo!/hi!) e^{-|a|^2/2} |a|^k L_lo^{(k)}(|a|^2) times
    // the phase of alpha^k (row >= col) or (-alpha^*)^k (row < col).
    for (int k = 0; k <= max_order; ++k) {
        const auto lag = laguerre_sequence(max_order - k, k, a2);
        for (int lo = 0; lo + k <= max_order; ++lo) {
            const int hi = lo + k;
            const double log_mag = 0.5 * (log_factorial(static_cast<std::size_t>(lo)) -
                                          log_factorial(static_cast<std::size_t>(hi))) +
                                   k * log_a - 0.5 * a2;
            const double value = lag[static_cast<std::size_t>(lo)];
            const Complex base = polar_from_log(log_mag, 0.0) * value;
            d(hi, lo) = base * std::polar(1.0, k * theta);
            if (k > 0) {
                d(lo, hi) = base * std::polar(1.0, k * (std::numbers::pi - theta));
            }
        }
    }
    return d;
}

FieldState displaced_thermal(Complex alpha, double nbar, std::size_t cutoff, DtsMethod method) {
    require_cutoff(cutoff, "displaced_thermal");
    require_finite_alpha(alpha, "displaced_thermal");
    require_nbar(nbar, "displaced_thermal");
    if (nbar == 0.0) {
        FieldState out = coherent_state(alpha, cutoff);
        out.kind = StateKind::dts;
        return out;
    }
    const FieldParams params{alpha, nbar, 1.0, cutoff, 0};
    const double thermal_tail = geometric_tail(nbar, cutoff);
    auto tail_at = [alpha, nbar](std::size_t c) { return dts_tail(alpha, nbar, c); };
    if (thermal_tail > kTailBound) {
        throw_cutoff("displaced_thermal", thermal_tail, suggest_cutoff(tail_at, cutoff));
    }
    const auto n = static_cast<Eigen::Index>(cutoff);
    const double ratio = params.thermal_ratio();

    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    switch (method) {
    case DtsMethod::unitary: {
        const ComplexMatrix d = displacement_operator(alpha, cutoff);
        RealVector p(n);
        double w = params.epsilon();
        for (Eigen::Index i = 0; i < n; ++i) {
            p(i) = w;
            w *= ratio;
        }
        rho = d * p.cast<Complex>().asDiagonal() * d.adjoint();
        break;
    }
    case DtsMethod::displaced_number: {
        const std::size_t terms = geometric_terms(ratio);
        double w = params.epsilon();
        for_each_displaced_number(alpha, cutoff, terms, [&](std::size_t, const ComplexVector& v) {
            rho.selfadjointView<Eigen::Lower>().rankUpdate(v, w);
            w *= ratio;
        });
        rho = ComplexMatrix(rho.selfadjointView<Eigen::Lower>());
        break;
    }
    case DtsMethod::pacs_mixture: {
        const auto weights = pacs_mixture_weights(alpha, nbar);
        const Complex beta = params.tilde_alpha();
        for (std::size_t m = 0; m < weights.size(); ++m) {
            const ComplexVector v = pacs_amplitudes(beta, static_cast<int>(m), cutoff);
            rho.selfadjointView<Eigen::Lower>().rankUpdate(v, weights[m]);
        }
        rho = ComplexMatrix(rho.selfadjointView<Eigen::Lower>());
        break;
    }
    }
    return finish(std::move(rho), params, StateKind::dts, tail_at, "displaced_thermal");
}

std::vector<double> pacs_mixture_weights(Complex alpha, double nbar) {
    require_finite_alpha(alpha, "pacs_mixture_weights");
    require_nbar(nbar, "pacs_mixture_weights");
    if (nbar == 0.0) {
        return {1.0};
    }
    const FieldParams p{alpha, nbar, 1.0, kDefaultCutoff, 0};
    const double b2 = std::norm(p.tilde_alpha());
    const double ratio = p.thermal_ratio();
    // Weight of order m: e^{-nbar |b|^2} / (1 + nbar) x^m L_m(-|b|^2); the
    // Laguerre generating function makes these sum to one.
    const auto lag = laguerre_sequence(kMaxMixtureTerms, 0, -b2);
    const double log_prefactor = -nbar * b2 + std::log(p.epsilon());
    const double log_ratio = std::log(ratio);
    std::vector<double> weights;
    double cumulative = 0.0;
    for (int m = 0; m <= kMaxMixtureTerms; ++m) {
        const double w = std::exp(log_prefactor + m * log_ratio +
                                  std::log(lag[static_cast<std::size_t>(m)]));
        weights.push_back(w);
        cumulative += w;
        if (1.0 - cumulative < kMixtureTruncation) {
            return weights;
        }
    }
    throw MethodDiverged("PACS-mixture weights did not decay within " +
                         std::to_string(kMaxMixtureTerms) + " terms");
}

FieldState mtcs(Complex alpha, double nbar, double q, std::size_t cutoff) {
    require_cutoff(cutoff, "mtcs");
    require_finite_alpha(alpha, "mtcs");
    require_nbar(nbar, "mtcs");
    if (!(q >= 0.0 && q <= 1.0)) {
        throw DomainError("mtcs: q must lie in [0, 1]");
    }
    const FieldParams params{alpha, nbar, q, cutoff, 0};
    const FieldState thermal = thermal_state(nbar, cutoff);
    const ComplexVector v = coherent_amplitudes(alpha, cutoff);
    const double coherent_tail = poisson_tail(std::norm(alpha), cutoff);
    if (coherent_tail > kTailBound) {
        throw_cutoff("mtcs", coherent_tail,
                     suggest_cutoff([a2 = std::norm(alpha)](std::size_t c) {
                         return poisson_tail(a2, c);
                     }, cutoff));
    }
    // Un-normalized components so the recorded tail is the true lost mass.
    const ComplexMatrix thermal_raw = thermal.rho * (1.0 - thermal.tail_mass);
    ComplexMatrix rho = (1.0 - q) * thermal_raw + q * (v * v.adjoint());
    auto tail_at = [alpha, nbar, q](std::size_t c) {
        return (1.0 - q) * geometric_tail(nbar, c) + q * poisson_tail(std::norm(alpha), c);
    };
    return finish(std::move(rho), params, StateKind::mtcs, tail_at, "mtcs");
}

FieldState pacs(Complex alpha, int m, std::size_t cutoff) {
    require_cutoff(cutoff, "pacs");
    require_finite_alpha(alpha, "pacs");
    if (m < 0) {
        throw DomainError("pacs: order must be nonnegative");
    }
    const FieldParams params{alpha, 0.0, 1.0, cutoff, m};
    const ComplexVector v = pacs_amplitudes(alpha, m, cutoff);
    auto tail_at = [alpha, m](std::size_t c) {
        return std::max(0.0, 1.0 - pacs_amplitudes(alpha, m, c).squaredNorm());
    };
    return finish(v * v.adjoint(), params, StateKind::pacs, tail_at, "pacs");
}

double photon_add_normalizer(const FieldState& state) {
    // Tr(a^dag rho a) = sum_n (n + 1) rho_nn over the levels that stay below
    // the cutoff after raising.
    const auto n = state.rho.rows();
    double total = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        total += static_cast<double>(i + 1) * state.rho(i, i).real();
    }
    return total;
}

FieldState photon_add(const FieldState& state) {
    const auto n = state.rho.rows();
    const double normalizer = photon_add_normalizer(state);
    // Mass raised past the cutoff: the top level plus whatever the input
    // already lost, each weighted by (n + 1).
    const double lost = static_cast<double>(n) * state.rho(n - 1, n - 1).real() +
                        static_cast<double>(n + 1) * state.tail_mass;
    const double tail = lost / (normalizer + lost);
    if (tail > kTailBound) {
        throw_cutoff("photon_add", tail,
                     state.cutoff() + std::max<std::size_t>(10, state.cutoff() / 4));
    }
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        for (Eigen::Index j = 1; j < n; ++j) {
            out(i, j) = std::sqrt(static_cast<double>(i) * static_cast<double>(j)) *
                        state.rho(i - 1, j - 1);
        }
    }
    out /= normalizer;
    FieldState result;
    result.rho = 0.5 * (out + out.adjoint());
    result.params = state.params;
    result.kind = state.kind;
    result.photons_added = state.photons_added + 1;
    result.tail_mass = tail;
    return result;
}

FieldState truncate_field(const FieldState& state, std::size_t dim) {
    require_cutoff(dim, "truncate_field");
    if (dim > state.cutoff()) {
        throw DimensionMismatch("truncate_field: target dimension exceeds the state's cutoff");
    }
    const auto n = static_cast<Eigen::Index>(dim);
    FieldState out = state;
    out.rho = state.rho.topLeftCorner(n, n);
    const double kept = raw_trace(out.rho);
    out.rho /= kept;
    out.params.cutoff = dim;
    out.tail_mass = state.tail_mass + (1.0 - state.tail_mass) * (1.0 - kept);
    return out;
}

double equal_overlap_q(Complex alpha, double nbar) {
    require_finite_alpha(alpha, "equal_overlap_q");
    require_nbar(nbar, "equal_overlap_q");
    const double e = std::exp(-std::norm(alpha) / (1.0 + nbar));
    const double denom = nbar + 1.0 - e;
    if (denom == 0.0) {
        // alpha = 0 and nbar = 0: both states are the vacuum, any q works.
        return 0.0;
    }
    return (1.0 - e) / denom;
}

double coherent_overlap(const FieldState& state, Complex alpha) {
    const ComplexVector v = coherent_amplitudes(alpha, state.cutoff());
    return (v.adjoint() * state.rho * v)(0, 0).real();
}

double purity_deficit(const FieldState& state) {
    return 1.0 - state.rho.cwiseAbs2().sum();
}

double mean_photon_number(const FieldState& state) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < state.rho.rows(); ++i) {
        total += static_cast<double>(i) * state.rho(i, i).real();
    }
    return total;
}

std::vector<double> photon_distribution(const FieldState& state) {
    std::vector<double> out(static_cast<std::size_t>(state.rho.rows()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        out[i] = state.rho(idx, idx).real();
    }
    return out;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& p, double flat_tol) {
    std::vector<std::size_t> peaks;
    constexpr double none = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double left = i == 0 ? none : p[i - 1];
        const double right = i + 1 == p.size() ? none : p[i + 1];
        if (p[i] > left + flat_tol && p[i] > right + flat_tol) {
            peaks.push_back(i);
        }
    }
    return peaks;
}

Complex closed_form_element(StateKind kind, std::size_t n, std::size_t m,
                            const FieldParams& params) {
    params.validate();
    if (n >= params.cutoff || m >= params.cutoff) {
        throw DomainError("closed_form_element: index beyond cutoff");
    }
    const double a2 = params.alpha_sq();
    const double theta = params.theta();
    const double phase = (static_cast<double>(n) - static_cast<double>(m)) * theta;
    const double ratio = params.thermal_ratio();

    if (kind == StateKind::mtcs) {
        Complex value{0.0, 0.0};
        if (n == m) {
            value += (1.0 - params.q) * params.epsilon() * std::pow(ratio, static_cast<double>(n));
        }
        if (a2 > 0.0) {
            const double log_mag = -a2 + 0.5 * static_cast<double>(n + m) * std::log(a2) -
                                   0.5 * (log_factorial(n) + log_factorial(m));
            value += params.q * polar_from_log(log_mag, phase);
        } else if (n == 0 && m == 0) {
            value += params.q;
        }
        return value;
    }
    if (kind != StateKind::dts) {
        throw DomainError("closed_form_element: kind must be dts or mtcs");
    }
    if (params.nbar <= 0.0) {
        throw DomainError("closed_form_element: dts form needs nbar > 0; use coherent_state");
    }
    const std::size_t lo = std::min(n, m);
    const std::size_t hi = std::max(n, m);
    const std::size_t k = hi - lo;
    const double nbar = params.nbar;
    // sqrt(lo!/hi!) nbar^lo / (1+nbar)^(hi+1) e^{-|a|^2/(1+nbar)} |a|^k
    //   L_lo^{(k)}(-|a|^2 / (nbar (1+nbar))), phase e^{i(n-m)theta}.
    if (a2 == 0.0 && k > 0) {
        return {0.0, 0.0};
    }
    const double lag = laguerre(static_cast<int>(lo), static_cast<int>(k),
                                -a2 / (nbar * (1.0 + nbar)));
    double log_mag = 0.5 * (log_factorial(lo) - log_factorial(hi)) +
                     static_cast<double>(lo) * std::log(nbar) -
                     static_cast<double>(hi + 1) * std::log1p(nbar) - a2 / (1.0 + nbar) +
                     std::log(lag);
    if (k > 0) {
        log_mag += 0.5 * static_cast<double>(k) * std::log(a2);
    }
    return polar_from_log(log_mag, phase);
}

} // namespace jcnoise
