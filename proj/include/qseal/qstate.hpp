#pragma once

// Quantum states, POVMs and the measurement rules built on them.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qseal/errors.hpp"
#include "qseal/matcore.hpp"
#include "qseal/rng.hpp"

namespace qseal {

// Tolerance on sum(E_i) = I for POVMs.
inline constexpr double kPovmTol = 1e-9;
// Outcomes at or below this probability carry no post-measurement state.
inline constexpr double kProbabilityFloor = 1e-12;

struct Bipartition {
    Index dimA = 1;
    Index dimB = 1;
    bool operator==(const Bipartition&) const = default;
};

class PureState {
public:
    explicit PureState(ComplexVector amplitudes, std::optional<Bipartition> dims = std::nullopt)
        : amplitudes_(std::move(amplitudes)), dims_(dims) {
        if (amplitudes_.size() == 0) throw DimensionError("PureState: empty amplitude vector");
        if (!all_finite(amplitudes_)) throw ValidationError("PureState: non-finite amplitude");
        const double norm = amplitudes_.norm();
        if (std::abs(norm - 1.0) > kHermitianTol)
            throw ValidationError("PureState: norm is " + std::to_string(norm) + ", expected 1");
        if (dims_ && (dims_->dimA <= 0 || dims_->dimB <= 0 || dims_->dimA * dims_->dimB != amplitudes_.size()))
            throw DimensionError("PureState: bipartition does not match vector length");
    }

    static PureState normalized(const ComplexVector& v, std::optional<Bipartition> dims = std::nullopt) {
        const double norm = v.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("PureState: cannot normalize vector");
        return PureState(v / norm, dims);
    }

    const ComplexVector& amplitudes() const { return amplitudes_; }
    Index dim() const { return amplitudes_.size(); }
    const std::optional<Bipartition>& dims() const { return dims_; }
    Bipartition bipartition() const { return dims_.value_or(Bipartition{1, dim()}); }

private:
    ComplexVector amplitudes_;
    std::optional<Bipartition> dims_;
};

class DensityMatrix {
public:
    // Validates Hermiticity, unit trace and PSD within kHermitianTol;
    // the stored matrix is the symmetrized input.
    explicit DensityMatrix(const ComplexMatrix& m) {
        require_square(m, "DensityMatrix");
        if (!is_hermitian(m)) throw ValidationError("DensityMatrix: matrix is not Hermitian");
        matrix_ = hermitian_part(m);
        const double tr = matrix_.trace().real();
        if (std::abs(tr - 1.0) > kHermitianTol)
            throw ValidationError("DensityMatrix: trace is " + std::to_string(tr) + ", expected 1");
        const double min_eig = hermitian_eigendecomp(matrix_).eigenvalues.minCoeff();
        if (min_eig < -kHermitianTol)
            throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(min_eig));
    }

    const ComplexMatrix& matrix() const { return matrix_; }
    Index dim() const { return matrix_.rows(); }

private:
    ComplexMatrix matrix_;
};

inline DensityMatrix densify(const PureState& s) { return DensityMatrix(outer(s.amplitudes())); }

inline PureState basis_state(Index dim, Index k) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(k) = 1.0;
    return PureState(v);
}

// Either a plain index i or a pair (i, j). Ordering is lexicographic with a
// plain index sorting before any pair sharing its first component.
class OutcomeLabel {
public:
    static OutcomeLabel simple(int i) { return OutcomeLabel(i, false, 0); }
    static OutcomeLabel pair(int i, int j) { return OutcomeLabel(i, true, j); }

    bool is_pair() const { return is_pair_; }
    int first() const { return first_; }
    int second() const { return second_; }

    std::string to_string() const {
        if (!is_pair_) return std::to_string(first_);
        return "(" + std::to_string(first_) + "," + std::to_string(second_) + ")";
    }

    auto operator<=>(const OutcomeLabel&) const = default;

private:
    OutcomeLabel(int i, bool is_pair, int j) : first_(i), is_pair_(is_pair), second_(j) {}

    int first_;
    bool is_pair_;
    int second_;
};

struct PovmElement {
    OutcomeLabel label;
    ComplexMatrix op;
};

class Povm {
public:
    // Elements are sorted into canonical label order. Each must be Hermitian
    // PSD within kHermitianTol and together they must sum to I within `tol`.
    explicit Povm(std::vector<PovmElement> elements, double tol = kPovmTol) : elements_(std::move(elements)) {
        if (elements_.empty()) throw ValidationError("Povm: no elements");
        std::sort(elements_.begin(), elements_.end(),
                  [](const PovmElement& a, const PovmElement& b) { return a.label < b.label; });
        for (std::size_t k = 1; k < elements_.size(); ++k)
            if (elements_[k].label == elements_[k - 1].label)
                throw ValidationError("Povm: duplicate label " + elements_[k].label.to_string());
        const Index d = elements_.front().op.rows();
        ComplexMatrix sum = ComplexMatrix::Zero(d, d);
        roots_.reserve(elements_.size());
        for (auto& e : elements_) {
            require_square(e.op, "Povm");
            if (e.op.rows() != d) throw DimensionError("Povm: elements have different dimensions");
            if (!is_hermitian(e.op))
                throw ValidationError("Povm: element " + e.label.to_string() + " is not Hermitian");
            e.op = hermitian_part(e.op);
            roots_.push_back(psd_root(e));
            sum += e.op;
        }
        const double err = max_abs_entry(sum - identity(d));
        if (err > tol)
            throw ValidationError("Povm: elements sum to identity only within " + std::to_string(err));
    }

    const std::vector<PovmElement>& elements() const { return elements_; }
    const PovmElement& operator[](std::size_t k) const { return elements_[k]; }
    std::size_t size() const { return elements_.size(); }
    Index dim() const { return elements_.front().op.rows(); }

    // PSD square root of element k.
    const ComplexMatrix& root(std::size_t k) const { return roots_[k]; }

    std::optional<std::size_t> find(const OutcomeLabel& label) const {
        for (std::size_t k = 0; k < elements_.size(); ++k)
            if (elements_[k].label == label) return k;
        return std::nullopt;
    }

private:
    static ComplexMatrix psd_root(const PovmElement& e) {
        const ComplexMatrix& m = e.op;
        // Diagonal elements (projectors in the computational basis) skip the eigensolver.
        if (max_abs_entry(m - ComplexMatrix(m.diagonal().asDiagonal())) == 0.0) {
            ComplexMatrix r = ComplexMatrix::Zero(m.rows(), m.cols());
            for (Index i = 0; i < m.rows(); ++i) {
                const double v = m(i, i).real();
                if (v < -kHermitianTol)
                    throw ValidationError("Povm: element " + e.label.to_string() + " is not PSD");
                r(i, i) = std::sqrt(std::max(v, 0.0));
            }
            return r;
        }
        try {
            return matrix_sqrt_psd(m);
        } catch (const ValidationError&) {
            throw ValidationError("Povm: element " + e.label.to_string() + " is not PSD");
        }
    }

    std::vector<PovmElement> elements_;
    std::vector<ComplexMatrix> roots_;
};

inline Povm standard_basis_povm(Index dim) {
    std::vector<PovmElement> elems;
    for (Index k = 0; k < dim; ++k) {
        ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
        p(k, k) = 1.0;
        elems.push_back({OutcomeLabel::simple(static_cast<int>(k)), p});
    }
    return Povm(std::move(elems));
}

struct LabeledProbability {
    OutcomeLabel label;
    double probability;
};

struct MeasurementOutcome {
    OutcomeLabel label;
    double probability;
    std::optional<DensityMatrix> post_state;  // absent when probability <= kProbabilityFloor
};

namespace detail {

// Re tr(A B) without forming the product.
inline double trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.transpose().cwiseProduct(b).sum().real();
}

inline void require_same_dim(const DensityMatrix& rho, const Povm& povm, const char* what) {
    if (rho.dim() != povm.dim())
        throw DimensionError(std::string(what) + ": state is " + std::to_string(rho.dim()) +
                             "-dimensional but POVM acts on dimension " + std::to_string(povm.dim()));
}

inline ComplexMatrix sandwich(const ComplexMatrix& root, const ComplexMatrix& rho) { return root * rho * root; }

}  // namespace detail

inline std::vector<LabeledProbability> measure_probabilities(const DensityMatrix& rho, const Povm& povm) {
    detail::require_same_dim(rho, povm, "measure_probabilities");
    std::vector<LabeledProbability> out;
    out.reserve(povm.size());
    for (const auto& e : povm.elements()) {
        const double p = detail::trace_of_product(e.op, rho.matrix());
        out.push_back({e.label, std::clamp(p, 0.0, 1.0)});
    }
    return out;
}

namespace detail {

inline MeasurementOutcome collapse(const DensityMatrix& rho, const Povm& povm, std::size_t k, double p) {
    if (p <= kProbabilityFloor) return {povm[k].label, 0.0, std::nullopt};
    ComplexMatrix post = sandwich(povm.root(k), rho.matrix()) / Complex(p, 0.0);
    // Renormalize against the realized trace so clamping of p cannot leak into the state.
    post /= post.trace().real();
    return {povm[k].label, p, DensityMatrix(post)};
}

}  // namespace detail

// Outcome k collapses rho to sqrt(E_k) rho sqrt(E_k) / tr(E_k rho).
inline std::vector<MeasurementOutcome> standard_implementation(const DensityMatrix& rho, const Povm& povm) {
    const auto probs = measure_probabilities(rho, povm);
    std::vector<MeasurementOutcome> out;
    out.reserve(povm.size());
    for (std::size_t k = 0; k < povm.size(); ++k) out.push_back(detail::collapse(rho, povm, k, probs[k].probability));
    return out;
}

// Post-measurement state when the outcome is not recorded: sum_k sqrt(E_k) rho sqrt(E_k).
inline DensityMatrix unknown_outcome_state(const DensityMatrix& rho, const Povm& povm) {
    detail::require_same_dim(rho, povm, "unknown_outcome_state");
    ComplexMatrix sum = ComplexMatrix::Zero(rho.dim(), rho.dim());
    for (std::size_t k = 0; k < povm.size(); ++k) sum += detail::sandwich(povm.root(k), rho.matrix());
    return DensityMatrix(sum);
}

// Merges elements (i, j) sharing the same i into one element labeled i.
inline Povm coarse_grain(const Povm& povm) {
    std::vector<PovmElement> merged;
    for (const auto& e : povm.elements()) {
        if (!e.label.is_pair())
            throw ValidationError("coarse_grain: label " + e.label.to_string() + " is not an (i, j) pair");
        // Canonical order keeps equal first components adjacent.
        if (merged.empty() || merged.back().label.first() != e.label.first())
            merged.push_back({OutcomeLabel::simple(e.label.first()), e.op});
        else
            merged.back().op += e.op;
    }
    return Povm(std::move(merged));
}

// Optimal success probability for telling rho from sigma with equal priors.
inline double helstrom_probability(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw DimensionError("helstrom_probability: dimension mismatch");
    return std::clamp(0.5 + 0.25 * trace_norm(rho.matrix() - sigma.matrix()), 0.5, 1.0);
}

// Inverse-CDF draw over the canonical label order.
inline MeasurementOutcome sample_outcome(const DensityMatrix& rho, const Povm& povm, RngStream& rng) {
    const auto probs = measure_probabilities(rho, povm);
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t chosen = probs.size();
    std::size_t last_nonzero = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (probs[k].probability > kProbabilityFloor) last_nonzero = k;
        cumulative += probs[k].probability;
        if (chosen == probs.size() && u < cumulative && probs[k].probability > kProbabilityFloor) chosen = k;
    }
    // u can land past the accumulated total by rounding.
    if (chosen == probs.size()) chosen = last_nonzero;
    return detail::collapse(rho, povm, chosen, probs[chosen].probability);
}

}  // namespace qseal
