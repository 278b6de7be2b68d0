#pragma once

// Gentle measurement: how far a measurement with one near-certain outcome
// moves the state, both when the outcome is kept (bound 2 sqrt(eps)) and
// when it is discarded (bound 2 sqrt(eps) + eps).

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qseal/errors.hpp"
#include "qseal/matcore.hpp"
#include "qseal/qstate.hpp"
#include "qseal/rng.hpp"

namespace qseal {

// Slack allowed when comparing a computed left-hand side with its bound.
inline constexpr double kBoundTol = 1e-9;
// Slack for the exact identities used inside the unknown-outcome argument.
inline constexpr double kIdentityTol = 1e-10;

inline void require_unit_interval(double eps, const char* what) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw ValidationError(std::string(what) + ": epsilon " + std::to_string(eps) + " outside [0, 1]");
}

inline double classic_bound(double epsilon) {
    require_unit_interval(epsilon, "classic_bound");
    return 2.0 * std::sqrt(epsilon);
}

inline double unknown_outcome_bound(double epsilon) {
    require_unit_interval(epsilon, "unknown_outcome_bound");
    return 2.0 * std::sqrt(epsilon) + epsilon;
}

struct GentleInstance {
    DensityMatrix rho;
    Povm povm;
    OutcomeLabel dominant;
    double epsilon;  // 1 - tr(E_dominant rho)
};

inline GentleInstance make_gentle_instance(DensityMatrix rho, Povm povm, OutcomeLabel dominant) {
    if (rho.dim() != povm.dim()) throw DimensionError("make_gentle_instance: dimension mismatch");
    const auto k = povm.find(dominant);
    if (!k) throw ValidationError("make_gentle_instance: POVM has no element " + dominant.to_string());
    const double overlap = detail::trace_of_product(povm[*k].op, rho.matrix());
    const double eps = std::clamp(1.0 - overlap, 0.0, 1.0);
    return {std::move(rho), std::move(povm), dominant, eps};
}

struct GentleReport {
    double epsilon = 0.0;
    double lhs_classic = 0.0;    // || rho - sqrt(E_j) rho sqrt(E_j) ||_1
    double lhs_unknown = 0.0;    // || rho - sum_i sqrt(E_i) rho sqrt(E_i) ||_1
    double bound_classic = 0.0;  // 2 sqrt(eps)
    double bound_unknown = 0.0;  // 2 sqrt(eps) + eps
    bool satisfied_classic = false;
    bool satisfied_unknown = false;

    // Intermediate quantities of the unknown-outcome argument.
    double off_dominant_norm_sum = 0.0;   // sum_{i != j} || sqrt(E_i) rho sqrt(E_i) ||_1
    double off_dominant_trace_sum = 0.0;  // sum_{i != j} tr(E_i rho)
    bool triangle_step_holds = false;     // lhs_unknown <= lhs_classic + off_dominant_trace_sum
    bool norm_equals_trace = false;       // off_dominant_norm_sum == off_dominant_trace_sum
    bool trace_equals_epsilon = false;    // off_dominant_trace_sum == 1 - tr(E_j rho)

    double slack_classic() const { return bound_classic - lhs_classic; }
    double slack_unknown() const { return bound_unknown - lhs_unknown; }
    bool all_hold() const {
        return satisfied_classic && satisfied_unknown && triangle_step_holds && norm_equals_trace &&
               trace_equals_epsilon;
    }
};

inline GentleReport verify_instance(const GentleInstance& inst, double tol = kBoundTol) {
    const auto j = inst.povm.find(inst.dominant);
    if (!j || inst.rho.dim() != inst.povm.dim()) throw ValidationError("verify_instance: invalid instance");
    require_unit_interval(inst.epsilon, "verify_instance");
    const ComplexMatrix& rho = inst.rho.matrix();

    GentleReport r;
    r.epsilon = inst.epsilon;
    ComplexMatrix mixture = ComplexMatrix::Zero(rho.rows(), rho.cols());
    ComplexMatrix dominant_part;
    for (std::size_t k = 0; k < inst.povm.size(); ++k) {
        ComplexMatrix part = detail::sandwich(inst.povm.root(k), rho);
        mixture += part;
        if (k == *j) {
            dominant_part = std::move(part);
        } else {
            r.off_dominant_norm_sum += trace_norm(part);
            r.off_dominant_trace_sum += detail::trace_of_product(inst.povm[k].op, rho);
        }
    }
    r.lhs_classic = trace_norm(rho - dominant_part);
    r.lhs_unknown = trace_norm(rho - mixture);
    r.bound_classic = classic_bound(inst.epsilon);
    r.bound_unknown = unknown_outcome_bound(inst.epsilon);
    r.satisfied_classic = r.lhs_classic <= r.bound_classic + tol;
    r.satisfied_unknown = r.lhs_unknown <= r.bound_unknown + tol;
    r.triangle_step_holds = r.lhs_unknown <= r.lhs_classic + r.off_dominant_trace_sum + tol;
    r.norm_equals_trace = std::abs(r.off_dominant_norm_sum - r.off_dominant_trace_sum) <= kIdentityTol;
    const double complement = 1.0 - detail::trace_of_product(inst.povm[*j].op, rho);
    r.trace_equals_epsilon = std::abs(r.off_dominant_trace_sum - complement) <= kIdentityTol;
    return r;
}

namespace detail {

inline ComplexMatrix gaussian_matrix(Index rows, Index cols, RngStream& rng) {
    ComplexMatrix g(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
    return g;
}

// G G^dagger / tr, a random full-support (when rank == dim) state.
inline ComplexMatrix random_mixed_state(Index dim, Index rank, RngStream& rng) {
    const ComplexMatrix g = gaussian_matrix(dim, rank, rng);
    ComplexMatrix m = g * g.adjoint();
    return hermitian_part(m / m.trace());
}

inline ComplexMatrix random_pure_state(Index dim, RngStream& rng) {
    ComplexVector v = gaussian_matrix(dim, 1, rng).col(0);
    v.normalize();
    return outer(v);
}

inline ComplexMatrix unitary_from_hermitian(const ComplexMatrix& h, double theta) {
    const auto eig = hermitian_eigendecomp(h);
    ComplexVector phases(eig.eigenvalues.size());
    for (Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, theta * eig.eigenvalues(k));
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

inline ComplexMatrix inverse_sqrt_pd(const ComplexMatrix& m) {
    const auto eig = hermitian_eigendecomp(m);
    RealVector inv = eig.eigenvalues.cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    return hermitian_part(eig.eigenvectors * inv.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint());
}

// Splits the PSD operator `total` into `parts` random PSD pieces summing to it:
// piece_i = T^1/2 S^-1/2 A_i S^-1/2 T^1/2 with A_i Wishart and S = sum A_i.
inline std::vector<ComplexMatrix> random_psd_split(const ComplexMatrix& total, std::size_t parts, RngStream& rng) {
    if (parts == 1) return {total};
    const Index d = total.rows();
    std::vector<ComplexMatrix> a;
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < parts; ++k) {
        const ComplexMatrix g = gaussian_matrix(d, d, rng);
        a.push_back(hermitian_part(g * g.adjoint()));
        s += a.back();
    }
    const ComplexMatrix t_half = matrix_sqrt_psd(total);
    const ComplexMatrix left = t_half * inverse_sqrt_pd(s);
    std::vector<ComplexMatrix> out;
    for (const auto& ak : a) out.push_back(hermitian_part(left * ak * left.adjoint()));
    return out;
}

}  // namespace detail

// Random instance whose realized epsilon lies in [0, 2 * epsilon_target].
//
// rho is Haar-pure or a random-rank mixed state. The dominant element is
// (1 - delta) P + W, where P projects onto the leading eigenvectors of rho
// holding at least 1 - target/2 of its weight, delta <= target/2 and W is a
// PSD residue on the complement of P. It is then conjugated by a random
// unitary, shrunk until epsilon stays within 2 * target, and I - E_j is split
// randomly over the other outcomes.
inline GentleInstance random_instance(Index dim, int n_outcomes, double epsilon_target, RngStream& rng) {
    if (dim < 1 || dim > 64) throw ValidationError("random_instance: dim must be in [1, 64]");
    if (n_outcomes < 2) throw ValidationError("random_instance: need at least 2 outcomes");
    if (!(epsilon_target >= 0.0 && epsilon_target < 1.0))
        throw ValidationError("random_instance: epsilon_target must be in [0, 1)");

    ComplexMatrix rho;
    if (rng.uniform() < 0.5) {
        rho = detail::random_pure_state(dim, rng);
    } else {
        const auto rank = static_cast<Index>(1 + rng.uniform_index(static_cast<std::uint64_t>(dim)));
        rho = detail::random_mixed_state(dim, rank, rng);
    }
    const DensityMatrix state(rho);

    ComplexMatrix dominant = identity(dim);
    if (epsilon_target > 0.0) {
        const auto eig = hermitian_eigendecomp(state.matrix());
        // Leading eigenvectors until the captured weight reaches 1 - target/2.
        ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
        double captured = 0.0;
        for (Index k = dim - 1; k >= 0 && captured < 1.0 - epsilon_target / 2.0; --k) {
            p += outer(eig.eigenvectors.col(k));
            captured += eig.eigenvalues(k);
        }
        const ComplexMatrix q = identity(dim) - p;
        const double delta = rng.uniform(0.0, epsilon_target / 2.0);
        ComplexMatrix residue = ComplexMatrix::Zero(dim, dim);
        const ComplexMatrix g = detail::gaussian_matrix(dim, dim, rng);
        const ComplexMatrix w = hermitian_part(q * g * g.adjoint() * q);
        const double top = hermitian_eigendecomp(w).eigenvalues.maxCoeff();
        const double eta = rng.uniform(0.0, 0.5);
        if (top > 1e-12) residue = w * Complex(eta / top, 0.0);
        const ComplexMatrix base = hermitian_part(Complex(1.0 - delta, 0.0) * p + residue);

        const ComplexMatrix h = detail::gaussian_matrix(dim, dim, rng);
        const ComplexMatrix herm = hermitian_part(h) / std::max(1.0, hermitian_part(h).norm());
        double theta = rng.uniform(0.0, 1.0);
        dominant = base;
        for (int attempt = 0; attempt < 60; ++attempt, theta /= 2.0) {
            const ComplexMatrix u = detail::unitary_from_hermitian(herm, theta);
            const ComplexMatrix rotated = hermitian_part(u * base * u.adjoint());
            if (1.0 - detail::trace_of_product(rotated, state.matrix()) <= 2.0 * epsilon_target) {
                dominant = rotated;
                break;
            }
        }
    }

    const ComplexMatrix complement = hermitian_part(identity(dim) - dominant);
    auto pieces = detail::random_psd_split(complement, static_cast<std::size_t>(n_outcomes - 1), rng);
    const auto j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_outcomes)));

    std::vector<PovmElement> elems;
    for (int k = 0, piece = 0; k < n_outcomes; ++k) {
        if (k == j)
            elems.push_back({OutcomeLabel::simple(k + 1), dominant});
        else
            elems.push_back({OutcomeLabel::simple(k + 1), std::move(pieces[static_cast<std::size_t>(piece++)])});
    }
    return make_gentle_instance(state, Povm(std::move(elems)), OutcomeLabel::simple(j + 1));
}

}  // namespace qseal
