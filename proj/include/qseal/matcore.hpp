#pragma once

// Dense complex linear algebra used by every other part of the library.
//
// Matrices are plain Eigen::MatrixXcd values. All functions here are pure:
// they take const references and return fresh values.

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qseal/errors.hpp"

namespace qseal {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Absolute max-entry tolerance for Hermiticity and for negative eigenvalues.
inline constexpr double kHermitianTol = 1e-10;

// Largest dense dimension any operation will materialize.
inline constexpr Index kMaxDenseDim = 4096;

struct HermitianEigenDecomposition {
    RealVector eigenvalues;      // ascending
    ComplexMatrix eigenvectors;  // column k belongs to eigenvalues[k]

    ComplexMatrix reconstruct() const {
        return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
    }
};

enum class Subsystem { A, B };

inline ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

inline ComplexMatrix outer(const ComplexVector& v) { return v * v.adjoint(); }

inline double max_abs_entry(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

inline void require_valid(const ComplexMatrix& m, const char* what) {
    if (m.rows() <= 0 || m.cols() <= 0)
        throw DimensionError(std::string(what) + ": matrix must be non-empty");
    if (!all_finite(m))
        throw ValidationError(std::string(what) + ": matrix has non-finite entries");
}

inline void require_square(const ComplexMatrix& m, const char* what) {
    require_valid(m, what);
    if (m.rows() != m.cols())
        throw DimensionError(std::string(what) + ": matrix must be square, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol) {
    return m.rows() == m.cols() && max_abs_entry(m - m.adjoint()) <= tol;
}

// (m + m^dagger) / 2
inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
    return (m + m.adjoint()) * Complex(0.5, 0.0);
}

inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b,
                                    Index max_dim = kMaxDenseDim) {
    require_valid(a, "tensor_product");
    require_valid(b, "tensor_product");
    // Guard before multiplying so the product itself cannot overflow.
    if (a.rows() > max_dim / b.rows() || a.cols() > max_dim / b.cols())
        throw CapacityError("tensor_product: result exceeds maximum dense dimension " +
                            std::to_string(max_dim));
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Index convention: the joint basis index is iA * dimB + iB.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, Index dimA, Index dimB,
                                   Subsystem traced) {
    require_square(m, "partial_trace");
    if (dimA <= 0 || dimB <= 0 || m.rows() != dimA * dimB)
        throw DimensionError("partial_trace: matrix is " + std::to_string(m.rows()) +
                             "-dimensional, expected " + std::to_string(dimA) + "*" +
                             std::to_string(dimB));
    if (traced == Subsystem::A) {
        ComplexMatrix out = ComplexMatrix::Zero(dimB, dimB);
        for (Index a = 0; a < dimA; ++a) out += m.block(a * dimB, a * dimB, dimB, dimB);
        return out;
    }
    ComplexMatrix out(dimA, dimA);
    for (Index a1 = 0; a1 < dimA; ++a1)
        for (Index a2 = 0; a2 < dimA; ++a2)
            out(a1, a2) = m.block(a1 * dimB, a2 * dimB, dimB, dimB).trace();
    return out;
}

// Inputs within kHermitianTol of Hermitian are symmetrized first. The solver
// is Eigen's tridiagonal QR, which is deterministic for a fixed input.
inline HermitianEigenDecomposition hermitian_eigendecomp(const ComplexMatrix& m) {
    require_square(m, "hermitian_eigendecomp");
    const double skew = max_abs_entry(m - m.adjoint());
    if (skew > kHermitianTol)
        throw ValidationError("hermitian_eigendecomp: matrix is not Hermitian (max |m - m^dagger| = " +
                              std::to_string(skew) + ")");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw ValidationError("hermitian_eigendecomp: eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// Rejects eigenvalues below -kHermitianTol; clamps the rest to >= 0.
inline ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m) {
    const auto eig = hermitian_eigendecomp(m);
    if (eig.eigenvalues.minCoeff() < -kHermitianTol)
        throw ValidationError("matrix_sqrt_psd: matrix has eigenvalue " +
                              std::to_string(eig.eigenvalues.minCoeff()) + " below tolerance");
    const RealVector root = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    ComplexMatrix out = eig.eigenvectors * root.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
    return hermitian_part(out);
}

// tr sqrt(A^dagger A), i.e. the sum of singular values. Works for any square A.
inline double trace_norm(const ComplexMatrix& m) {
    require_square(m, "trace_norm");
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().sum();
}

// Sum of |eigenvalues|; only valid for Hermitian input.
inline double hermitian_trace_norm(const ComplexMatrix& m) {
    return hermitian_eigendecomp(m).eigenvalues.cwiseAbs().sum();
}

}  // namespace qseal
