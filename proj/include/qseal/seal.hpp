#pragma once

// Seal schemes, Bob's coarse-grained cheat, and Alice's two detection metrics
// (distinguishing probability and no-false-positive detection) with their
// closed-form upper bounds.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "qseal/errors.hpp"
#include "qseal/gentle.hpp"
#include "qseal/matcore.hpp"
#include "qseal/qstate.hpp"
#include "qseal/rng.hpp"

namespace qseal {

// Slack on the readout promise when validating a scheme.
inline constexpr double kPromiseTol = 1e-9;

namespace detail {

inline std::string real_text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

class PromiseViolation : public ValidationError {
public:
    PromiseViolation(int message, double realized, double promised)
        : ValidationError("promise violated for message " + std::to_string(message) + ": readout probability " +
                          detail::real_text(realized) + " < promised " + detail::real_text(promised)),
          message_(message),
          realized_(realized) {}

    int message() const { return message_; }
    double realized() const { return realized_; }

private:
    int message_;
    double realized_;
};

namespace detail {

// Probability that Bob's POVM on rho_m returns some label (m, j).
inline double readout_probability(const PureState& psi, Bipartition dims, const Povm& povm, int m) {
    const ComplexMatrix rho_b = partial_trace(outer(psi.amplitudes()), dims.dimA, dims.dimB, Subsystem::A);
    double total = 0.0;
    for (const auto& e : povm.elements())
        if (e.label.first() == m) total += trace_of_product(e.op, rho_b);
    return std::clamp(total, 0.0, 1.0);
}

}  // namespace detail

class SealScheme {
public:
    // Messages are numbered 1..M. Every POVM label must be a pair (i, j) with
    // i in [1, M], and every message must meet the promise.
    SealScheme(int M, Bipartition dims, std::vector<PureState> states, Povm bob_povm, double promised_p)
        : M_(M), dims_(dims), states_(std::move(states)), bob_povm_(std::move(bob_povm)), promised_p_(promised_p),
          coarse_(validated_coarse()) {
        for (int m = 1; m <= M_; ++m) {
            const double realized = detail::readout_probability(state(m), dims_, bob_povm_, m);
            if (realized < promised_p_ - kPromiseTol) throw PromiseViolation(m, realized, promised_p_);
        }
    }

    int message_count() const { return M_; }
    Bipartition dims() const { return dims_; }
    Index joint_dim() const { return dims_.dimA * dims_.dimB; }
    const std::vector<PureState>& states() const { return states_; }
    const PureState& state(int m) const {
        require_message(m);
        return states_[static_cast<std::size_t>(m - 1)];
    }
    const Povm& bob_povm() const { return bob_povm_; }
    // F_i = sum_j E_(i, j), labeled i.
    const Povm& coarse_povm() const { return coarse_; }
    double promised_p() const { return promised_p_; }

    void require_message(int m) const {
        if (m < 1 || m > M_)
            throw ValidationError("message " + std::to_string(m) + " outside [1, " + std::to_string(M_) + "]");
    }

    // rho_m, Bob's share of |psi_m>.
    DensityMatrix reduced_state(int m) const {
        return DensityMatrix(partial_trace(outer(state(m).amplitudes()), dims_.dimA, dims_.dimB, Subsystem::A));
    }

private:
    Povm validated_coarse() const {
        if (M_ < 2) throw ValidationError("SealScheme: need at least 2 messages");
        if (dims_.dimA < 1 || dims_.dimB < 1) throw DimensionError("SealScheme: subsystem dimensions must be positive");
        if (dims_.dimA > kMaxDenseDim / dims_.dimB) throw CapacityError("SealScheme: joint dimension too large");
        if (states_.size() != static_cast<std::size_t>(M_))
            throw ValidationError("SealScheme: expected " + std::to_string(M_) + " states, got " +
                                  std::to_string(states_.size()));
        for (const auto& s : states_)
            if (s.dim() != dims_.dimA * dims_.dimB) throw DimensionError("SealScheme: state dimension mismatch");
        if (bob_povm_.dim() != dims_.dimB) throw DimensionError("SealScheme: POVM must act on system B");
        for (const auto& e : bob_povm_.elements())
            if (!e.label.is_pair() || e.label.first() < 1 || e.label.first() > M_)
                throw ValidationError("SealScheme: POVM label " + e.label.to_string() + " is not (i, j) with i in [1, M]");
        if (!(promised_p_ > 1.0 / M_ && promised_p_ <= 1.0))
            throw ValidationError("SealScheme: promised_p must lie in (1/M, 1]");
        return coarse_grain(bob_povm_);
    }

    int M_;
    Bipartition dims_;
    std::vector<PureState> states_;
    Povm bob_povm_;
    double promised_p_;
    Povm coarse_;
};

inline double promise_probability(const SealScheme& scheme, int m) {
    scheme.require_message(m);
    return detail::readout_probability(scheme.state(m), scheme.dims(), scheme.bob_povm(), m);
}

namespace detail {

// (I_A (x) sqrt(F_i)) |psi_m> for every coarse outcome i.
inline std::vector<ComplexVector> lifted_branches(const SealScheme& scheme, int m) {
    const auto& coarse = scheme.coarse_povm();
    const ComplexMatrix id_a = identity(scheme.dims().dimA);
    std::vector<ComplexVector> out;
    out.reserve(coarse.size());
    for (std::size_t k = 0; k < coarse.size(); ++k)
        out.push_back(tensor_product(id_a, coarse.root(k)) * scheme.state(m).amplitudes());
    return out;
}

}  // namespace detail

// State Alice gets back after Bob measures the coarse POVM with the standard
// implementation and forgets nothing but the outcome record.
inline DensityMatrix coarse_cheat_state(const SealScheme& scheme, int m) {
    scheme.require_message(m);
    const Index n = scheme.joint_dim();
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (const auto& branch : detail::lifted_branches(scheme, m)) sum += outer(branch);
    return DensityMatrix(sum);
}

struct BoundValue {
    double raw;
    double clamped;  // min(raw, 1)
};

// 1/2 + (2 sqrt(1 - p) + 1 - p) / 4. Exceeds 1 for small p, so both forms are kept.
inline BoundValue p_dist_upper_bound(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p_dist_upper_bound: p outside [0, 1]");
    const double raw = 0.5 + 0.25 * unknown_outcome_bound(1.0 - p);
    return {raw, std::min(raw, 1.0)};
}

inline double p_dist_numeric(const SealScheme& scheme, int m) {
    const DensityMatrix returned = coarse_cheat_state(scheme, m);
    const ComplexMatrix original = outer(scheme.state(m).amplitudes());
    return std::clamp(0.5 + 0.25 * trace_norm(original - returned.matrix()), 0.5, 1.0);
}

// 1 - sum_i |<psi_m| I_A (x) sqrt(F_i) |psi_m>|^2, the detection probability of
// Alice's measurement {I - |psi_m><psi_m|, |psi_m><psi_m|}.
inline double p_nfp_numeric(const SealScheme& scheme, int m) {
    const ComplexVector& psi = scheme.state(m).amplitudes();
    double overlap = 0.0;
    for (const auto& branch : detail::lifted_branches(scheme, m)) overlap += std::norm(psi.dot(branch));
    return std::clamp(1.0 - overlap, 0.0, 1.0);
}

// tr((I - |psi_m><psi_m|) rho_returned), computed from the returned state.
inline double p_nfp_from_returned_state(const SealScheme& scheme, int m) {
    const DensityMatrix returned = coarse_cheat_state(scheme, m);
    const ComplexVector& psi = scheme.state(m).amplitudes();
    const double stay = psi.dot(returned.matrix() * psi).real();
    return std::clamp(1.0 - stay, 0.0, 1.0);
}

inline void require_nfp_domain(double p, int M, const char* what) {
    if (M < 2) throw ValidationError(std::string(what) + ": M must be at least 2");
    // 1/M itself must be admitted even when it is not exactly representable.
    if (!(p >= 1.0 / M - 1e-12 && p <= 1.0))
        throw ValidationError(std::string(what) + ": p = " + std::to_string(p) + " outside [1/M, 1]");
}

// 1 - p^2 - (1 - p)^2 / (M - 1)
inline double p_nfp_upper_bound(double p, int M) {
    require_nfp_domain(p, M, "p_nfp_upper_bound");
    return std::clamp(1.0 - p * p - (1.0 - p) * (1.0 - p) / (M - 1), 0.0, 1.0);
}

// True iff the no-false-positive bound is non-increasing in the readout
// probability across `grid` (visited in ascending order).
inline bool monotonicity_check(std::vector<double> grid, int M) {
    for (double t : grid) require_nfp_domain(t, M, "monotonicity_check");
    std::sort(grid.begin(), grid.end());
    const double ulp_slack = 4.0 * std::numeric_limits<double>::epsilon();
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (p_nfp_upper_bound(grid[k], M) > p_nfp_upper_bound(grid[k - 1], M) + ulp_slack) return false;
    return true;
}

struct MessageDetection {
    int message;
    double promise_probability;
    double p_dist_numeric;
    BoundValue p_dist_upper;
    double p_nfp_numeric;
    double p_nfp_upper;
};

// Per-message metrics and their uniform average over messages. Other priors
// over Alice's messages are not modeled.
struct DetectionReport {
    double p_dist_numeric = 0.0;
    double p_dist_upper = 0.0;
    double p_dist_upper_raw = 0.0;
    double p_nfp_numeric = 0.0;
    double p_nfp_upper = 0.0;
    std::vector<MessageDetection> per_message;

    bool bounds_hold(double tol = kBoundTol) const {
        return std::all_of(per_message.begin(), per_message.end(), [tol](const MessageDetection& d) {
            return d.p_dist_numeric <= d.p_dist_upper.clamped + tol && d.p_nfp_numeric <= d.p_nfp_upper + tol;
        });
    }
};

// Bounds are evaluated at each message's realized readout probability.
inline DetectionReport evaluate_detection(const SealScheme& scheme) {
    DetectionReport r;
    const int M = scheme.message_count();
    for (int m = 1; m <= M; ++m) {
        const double t = promise_probability(scheme, m);
        MessageDetection d{m, t, p_dist_numeric(scheme, m), p_dist_upper_bound(t), p_nfp_numeric(scheme, m),
                           p_nfp_upper_bound(std::max(t, 1.0 / M), M)};
        r.p_dist_numeric += d.p_dist_numeric;
        r.p_dist_upper += d.p_dist_upper.clamped;
        r.p_dist_upper_raw += d.p_dist_upper.raw;
        r.p_nfp_numeric += d.p_nfp_numeric;
        r.p_nfp_upper += d.p_nfp_upper;
        r.per_message.push_back(d);
    }
    r.p_dist_numeric /= M;
    r.p_dist_upper /= M;
    r.p_dist_upper_raw /= M;
    r.p_nfp_numeric /= M;
    r.p_nfp_upper /= M;
    return r;
}

namespace detail {

inline ComplexMatrix random_unitary(Index d, RngStream& rng) {
    const ComplexMatrix g = gaussian_matrix(d, d, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    return qr.householderQ();
}

}  // namespace detail

// Random valid scheme with M messages (requires dimB >= M).
//
// Bob's coarse elements are F_m = (1 - eta) U P_m U^dagger + eta I / M, with
// P_m projecting onto the basis vectors k = m - 1 (mod M), each refined into
// one to three random PSD pieces. |psi_m> is Gaussian with its B-side weight
// concentrated on the range of U P_m U^dagger. The promise is the smallest
// realized readout probability.
inline SealScheme random_scheme(int M, Index dimA, Index dimB, RngStream& rng) {
    if (M < 2 || dimB < M) throw ValidationError("random_scheme: need M >= 2 and dimB >= M");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const ComplexMatrix u = detail::random_unitary(dimB, rng);
        const double eta = rng.uniform(0.0, 0.4);
        std::vector<PovmElement> elems;
        std::vector<ComplexMatrix> favoured;
        for (int m = 1; m <= M; ++m) {
            ComplexMatrix p = ComplexMatrix::Zero(dimB, dimB);
            for (Index k = m - 1; k < dimB; k += M) p(k, k) = 1.0;
            favoured.push_back(u * p * u.adjoint());
            const ComplexMatrix f =
                hermitian_part(Complex(1.0 - eta, 0.0) * favoured.back() + identity(dimB) * Complex(eta / M, 0.0));
            const auto pieces = 1 + rng.uniform_index(3);
            auto split = detail::random_psd_split(f, pieces, rng);
            for (std::size_t j = 0; j < split.size(); ++j)
                elems.push_back({OutcomeLabel::pair(m, static_cast<int>(j + 1)), std::move(split[j])});
        }
        Povm povm(std::move(elems));

        std::vector<PureState> states;
        double worst = 1.0;
        for (int m = 1; m <= M; ++m) {
            const double leak = rng.uniform(0.0, 0.5);
            const ComplexMatrix& proj = favoured[static_cast<std::size_t>(m - 1)];
            const ComplexMatrix filter = proj + Complex(leak, 0.0) * (identity(dimB) - proj);
            // Row a of psi_mat holds the B amplitudes paired with A basis state a.
            const ComplexMatrix psi_mat = detail::gaussian_matrix(dimA, dimB, rng) * filter.transpose();
            ComplexVector v(dimA * dimB);
            for (Index a = 0; a < dimA; ++a) v.segment(a * dimB, dimB) = psi_mat.row(a).transpose();
            states.push_back(PureState::normalized(v, Bipartition{dimA, dimB}));
            worst = std::min(worst, detail::readout_probability(states.back(), {dimA, dimB}, povm, m));
        }
        if (worst > 1.0 / M + 1e-3) return SealScheme(M, {dimA, dimB}, std::move(states), std::move(povm), worst);
    }
    throw ValidationError("random_scheme: could not draw a scheme meeting the promise");
}

}  // namespace qseal
