#pragma once

// The permuted product-state protocol: Alice hides 2q copies of |0> (or |1>)
// and q copies of |+> among 3q qubits. Bob can either measure every qubit and
// try to repair the damage, or measure the two-outcome majority projectors,
// which leave both message states untouched.

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qseal/errors.hpp"
#include "qseal/matcore.hpp"
#include "qseal/qstate.hpp"
#include "qseal/rng.hpp"
#include "qseal/seal.hpp"

namespace qseal::naive {

enum class QubitLabel { zero, one, plus };

// Largest q whose 3q-qubit state fits in kMaxDenseDim.
inline constexpr int kMaxDenseQ = 4;

inline std::vector<int> identity_permutation(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) p[static_cast<std::size_t>(k)] = k;
    return p;
}

// Uniform permutation by Fisher-Yates.
inline std::vector<int> random_permutation(int n, RngStream& rng) {
    auto p = identity_permutation(n);
    for (int k = n - 1; k > 0; --k) {
        const auto j = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(k + 1)));
        std::swap(p[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(j)]);
    }
    return p;
}

// Message m in {1, 2}. `labels` holds the unpermuted register contents:
// 2q copies of zero (m = 1) or one (m = 2) followed by q copies of plus.
// Base slot k is placed in register permutation[k].
class ProductState {
public:
    ProductState(int q, int message, std::vector<int> permutation)
        : q_(q), message_(message), permutation_(std::move(permutation)) {
        if (q < 1) throw ValidationError("ProductState: q must be at least 1");
        if (message != 1 && message != 2) throw ValidationError("ProductState: message must be 1 or 2");
        const int n = 3 * q;
        if (permutation_.size() != static_cast<std::size_t>(n))
            throw ValidationError("ProductState: permutation must have 3q entries");
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        for (int r : permutation_) {
            if (r < 0 || r >= n || seen[static_cast<std::size_t>(r)])
                throw ValidationError("ProductState: permutation is not a bijection on [0, 3q)");
            seen[static_cast<std::size_t>(r)] = true;
        }
        labels_.assign(static_cast<std::size_t>(2 * q), message == 1 ? QubitLabel::zero : QubitLabel::one);
        labels_.insert(labels_.end(), static_cast<std::size_t>(q), QubitLabel::plus);
    }

    int q() const { return q_; }
    int message() const { return message_; }
    int registers() const { return 3 * q_; }
    const std::vector<QubitLabel>& labels() const { return labels_; }
    const std::vector<int>& permutation() const { return permutation_; }

    // Contents of register 0 .. 3q-1 after the permutation.
    std::vector<QubitLabel> register_labels() const {
        std::vector<QubitLabel> out(labels_.size());
        for (std::size_t k = 0; k < labels_.size(); ++k) out[static_cast<std::size_t>(permutation_[k])] = labels_[k];
        return out;
    }

private:
    int q_;
    int message_;
    std::vector<int> permutation_;
    std::vector<QubitLabel> labels_;
};

inline std::pair<ProductState, ProductState> build_naive_scheme(int q, std::uint64_t sigma_seed,
                                                                std::uint64_t tau_seed) {
    if (q < 1) throw ValidationError("build_naive_scheme: q must be at least 1");
    RngStream sigma_rng(sigma_seed);
    RngStream tau_rng(tau_seed);
    return {ProductState(q, 1, random_permutation(3 * q, sigma_rng)),
            ProductState(q, 2, random_permutation(3 * q, tau_rng))};
}

inline void require_dense_q(int q, const char* what) {
    if (q < 1) throw ValidationError(std::string(what) + ": q must be at least 1");
    if (q > kMaxDenseQ)
        throw CapacityError(std::string(what) + ": q = " + std::to_string(q) + " exceeds dense limit " +
                            std::to_string(kMaxDenseQ));
}

// Dense vector of a product of single-qubit labels; register 0 is the most
// significant bit of the basis index.
inline ComplexVector dense_product(const std::vector<QubitLabel>& registers) {
    const double h = std::numbers::sqrt2 / 2.0;
    ComplexMatrix v = ComplexMatrix::Ones(1, 1);
    for (QubitLabel l : registers) {
        ComplexMatrix qubit(2, 1);
        switch (l) {
            case QubitLabel::zero: qubit << 1.0, 0.0; break;
            case QubitLabel::one: qubit << 0.0, 1.0; break;
            case QubitLabel::plus: qubit << h, h; break;
        }
        v = tensor_product(v, qubit);
    }
    return v.col(0);
}

inline PureState dense_state(const ProductState& s) {
    require_dense_q(s.q(), "dense_state");
    return PureState::normalized(dense_product(s.register_labels()));
}

inline int zero_count(std::uint64_t basis_index, int registers) {
    return registers - std::popcount(basis_index);
}

// Basis strings with more than 3q/2 zeros.
inline bool majority_zero(std::uint64_t basis_index, int q) { return 2 * zero_count(basis_index, 3 * q) > 3 * q; }

// {Pi_1, Pi_2}: diagonal projectors splitting the basis by majority_zero.
// Labels are (1, 1) and (2, 1) so the POVM can serve as Bob's instructions.
inline Povm majority_projector_povm(int q) {
    require_dense_q(q, "majority_projector_povm");
    const Index dim = Index{1} << (3 * q);
    ComplexMatrix pi1 = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix pi2 = ComplexMatrix::Zero(dim, dim);
    for (Index x = 0; x < dim; ++x) {
        if (majority_zero(static_cast<std::uint64_t>(x), q))
            pi1(x, x) = 1.0;
        else
            pi2(x, x) = 1.0;
    }
    return Povm({{OutcomeLabel::pair(1, 1), std::move(pi1)}, {OutcomeLabel::pair(2, 1), std::move(pi2)}});
}

namespace detail {

// max |<x|psi>| over basis strings x outside the region.
template <typename InRegion>
double leakage(const ComplexVector& psi, InRegion in_region) {
    double worst = 0.0;
    for (Index x = 0; x < psi.size(); ++x)
        if (!in_region(static_cast<std::uint64_t>(x))) worst = std::max(worst, std::abs(psi(x)));
    return worst;
}

}  // namespace detail

// Checks Pi_1 |psi_1> = |psi_1> and Pi_2 |psi_2> = |psi_2> within 1e-10, where
// Pi_1 projects onto basis strings satisfying `first_region(zero_count)` and
// Pi_2 onto the rest.
template <typename FirstRegion>
bool verify_nondisturbing_with(const ProductState& s1, const ProductState& s2, FirstRegion first_region) {
    const int n = s1.registers();
    if (s1.message() != 1 || s2.message() != 2 || s2.q() != s1.q())
        throw ValidationError("verify_nondisturbing: expects states for messages 1 and 2 with equal q");
    const auto psi1 = dense_state(s1).amplitudes();
    const auto psi2 = dense_state(s2).amplitudes();
    const double tol = kHermitianTol;
    const bool ok1 = detail::leakage(psi1, [&](std::uint64_t x) { return first_region(zero_count(x, n)); }) <= tol;
    const bool ok2 = detail::leakage(psi2, [&](std::uint64_t x) { return !first_region(zero_count(x, n)); }) <= tol;
    return ok1 && ok2;
}

inline bool verify_nondisturbing(const ProductState& s1, const ProductState& s2) {
    const int q = s1.q();
    return verify_nondisturbing_with(s1, s2, [q](int zeros) { return 2 * zeros > 3 * q; });
}

inline bool verify_nondisturbing(int q, std::uint64_t sigma_seed, std::uint64_t tau_seed) {
    require_dense_q(q, "verify_nondisturbing");
    const auto [s1, s2] = build_naive_scheme(q, sigma_seed, tau_seed);
    return verify_nondisturbing(s1, s2);
}

// Per-register standard-basis outcomes (0 or 1), in register order.
using Outcomes = std::vector<int>;

// Replace registers that gave the message-inconsistent outcome with |+>:
// outcome 1 for m = 1, outcome 0 for m = 2. The rest keep the measured state.
inline std::vector<QubitLabel> repair(const ProductState& s, const Outcomes& outcomes) {
    const int consistent = s.message() == 1 ? 0 : 1;
    std::vector<QubitLabel> out;
    out.reserve(outcomes.size());
    for (int o : outcomes) {
        if (o == consistent)
            out.push_back(o == 0 ? QubitLabel::zero : QubitLabel::one);
        else
            out.push_back(QubitLabel::plus);
    }
    return out;
}

// |<original|repaired>|^2 = (1/2)^k, k = plus registers that yielded the
// message-consistent outcome and were therefore left collapsed.
inline double analytic_trial_fidelity(const ProductState& s, const Outcomes& outcomes) {
    const int consistent = s.message() == 1 ? 0 : 1;
    const auto regs = s.register_labels();
    int k = 0;
    for (std::size_t r = 0; r < regs.size(); ++r)
        if (regs[r] == QubitLabel::plus && outcomes[r] == consistent) ++k;
    return std::ldexp(1.0, -k);
}

inline Outcomes sample_register_outcomes(const ProductState& s, RngStream& rng) {
    const auto regs = s.register_labels();
    Outcomes out(regs.size());
    for (std::size_t r = 0; r < regs.size(); ++r) {
        switch (regs[r]) {
            case QubitLabel::zero: out[r] = 0; break;
            case QubitLabel::one: out[r] = 1; break;
            case QubitLabel::plus: out[r] = rng.uniform() < 0.5 ? 0 : 1; break;
        }
    }
    return out;
}

struct AttackResult {
    std::int64_t trials = 0;
    double mean_fidelity = 0.0;
    double fidelity_m2 = 0.0;                      // sum of squared deviations from the mean
    std::vector<std::int64_t> outcome_histogram;  // index = number of 0 outcomes

    double detection_probability() const { return 1.0 - mean_fidelity; }
    double stderr_of_mean() const {
        if (trials < 2) return 0.0;
        return std::sqrt(fidelity_m2 / static_cast<double>(trials - 1) / static_cast<double>(trials));
    }
};

// Combines results of independent batches (count-weighted).
inline AttackResult merge(const AttackResult& a, const AttackResult& b) {
    if (a.trials == 0) return b;
    if (b.trials == 0) return a;
    AttackResult r;
    r.trials = a.trials + b.trials;
    const double delta = b.mean_fidelity - a.mean_fidelity;
    const double wb = static_cast<double>(b.trials) / static_cast<double>(r.trials);
    r.mean_fidelity = a.mean_fidelity + delta * wb;
    r.fidelity_m2 = a.fidelity_m2 + b.fidelity_m2 +
                    delta * delta * static_cast<double>(a.trials) * static_cast<double>(b.trials) /
                        static_cast<double>(r.trials);
    r.outcome_histogram = a.outcome_histogram;
    r.outcome_histogram.resize(std::max(a.outcome_histogram.size(), b.outcome_histogram.size()), 0);
    for (std::size_t k = 0; k < b.outcome_histogram.size(); ++k) r.outcome_histogram[k] += b.outcome_histogram[k];
    return r;
}

// Bob measures every register in the standard basis and repairs. Simulated
// register by register, so any q is allowed.
inline AttackResult simulate_qubitwise_attack(const ProductState& s, std::int64_t trials, RngStream& rng) {
    if (trials < 1) throw ValidationError("simulate_qubitwise_attack: trials must be at least 1");
    AttackResult r;
    r.outcome_histogram.assign(static_cast<std::size_t>(s.registers() + 1), 0);
    for (std::int64_t t = 0; t < trials; ++t) {
        const auto outcomes = sample_register_outcomes(s, rng);
        int zeros = 0;
        for (int o : outcomes) zeros += o == 0;
        ++r.outcome_histogram[static_cast<std::size_t>(zeros)];
        const double f = analytic_trial_fidelity(s, outcomes);
        // Welford update
        ++r.trials;
        const double delta = f - r.mean_fidelity;
        r.mean_fidelity += delta / static_cast<double>(r.trials);
        r.fidelity_m2 += delta * (f - r.mean_fidelity);
    }
    return r;
}

inline double detection_probability_naive(const AttackResult& result) { return 1.0 - result.mean_fidelity; }

// E[(1/2)^k] with k ~ Binomial(q, 1/2).
inline double exact_mean_fidelity(int q) { return std::pow(0.75, q); }

// The protocol as a two-message seal: Bob's instructions are the full
// standard-basis measurement, outcome x labeled (1, x + 1) when x has a
// majority of zeros and (2, x + 1) otherwise.
inline SealScheme as_seal_scheme(const ProductState& s1, const ProductState& s2) {
    const int q = s1.q();
    require_dense_q(q, "as_seal_scheme");
    const Index dim = Index{1} << (3 * q);
    std::vector<PovmElement> elems;
    for (Index x = 0; x < dim; ++x) {
        ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
        e(x, x) = 1.0;
        const int message = majority_zero(static_cast<std::uint64_t>(x), q) ? 1 : 2;
        elems.push_back({OutcomeLabel::pair(message, static_cast<int>(x + 1)), std::move(e)});
    }
    return SealScheme(2, {1, dim}, {dense_state(s1), dense_state(s2)}, Povm(std::move(elems)), 1.0);
}

}  // namespace qseal::naive
