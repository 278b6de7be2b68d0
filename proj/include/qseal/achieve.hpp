#pragma once

// Single-qubit two-message seal family
//   |psi_1> = sqrt(p)|0> + e^{i phi} sqrt(1-p)|1>
//   |psi_2> = sqrt(1-p)|0> + e^{i phi} sqrt(p)|1>
// read out by the standard-basis measurement, and the distinguishing
// probability Alice keeps against Bob's best cheat.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "qseal/errors.hpp"
#include "qseal/matcore.hpp"
#include "qseal/qstate.hpp"
#include "qseal/seal.hpp"

namespace qseal::achieve {

struct QubitSealFamily {
    double p;
    double phi;
};

inline void require_family(const QubitSealFamily& f) {
    if (!(f.p > 0.5 && f.p <= 1.0)) throw ValidationError("qubit seal family: p must lie in (1/2, 1]");
    if (!(f.phi >= 0.0 && f.phi < 2.0 * std::numbers::pi))
        throw ValidationError("qubit seal family: phi must lie in [0, 2 pi)");
}

inline ComplexVector family_vector(double first, double second, double phi) {
    ComplexVector v(2);
    v << std::sqrt(first), std::polar(std::sqrt(second), phi);
    return v;
}

inline PureState psi1(double p, double phi) { return PureState(family_vector(p, 1.0 - p, phi), Bipartition{1, 2}); }
inline PureState psi2(double p, double phi) { return PureState(family_vector(1.0 - p, p, phi), Bipartition{1, 2}); }

inline SealScheme build_family(const QubitSealFamily& f) {
    require_family(f);
    ComplexMatrix e1 = ComplexMatrix::Zero(2, 2);
    ComplexMatrix e2 = ComplexMatrix::Zero(2, 2);
    e1(0, 0) = 1.0;
    e2(1, 1) = 1.0;
    Povm povm({{OutcomeLabel::pair(1, 1), e1}, {OutcomeLabel::pair(2, 1), e2}});
    return SealScheme(2, {1, 2}, {psi1(f.p, f.phi), psi2(f.p, f.phi)}, std::move(povm), f.p);
}

inline SealScheme build_family(double p, double phi) { return build_family(QubitSealFamily{p, phi}); }

// diag(x, 1 - x)
inline DensityMatrix z_state(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("z_state: x outside [0, 1]");
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = x;
    m(1, 1) = 1.0 - x;
    return DensityMatrix(m);
}

// Bob's measure-and-return state for message m; Z(p) for m = 1, Z(1-p) for m = 2.
inline DensityMatrix returned_state(const QubitSealFamily& f, int m) {
    if (m != 1 && m != 2) throw ValidationError("returned_state: m must be 1 or 2");
    return coarse_cheat_state(build_family(f), m);
}

inline void require_lower_domain(double p, const char* what) {
    if (!(p >= 0.5 && p <= 1.0)) throw ValidationError(std::string(what) + ": p outside [1/2, 1]");
}

// The closed form 1/2 + sqrt(2p(1-p))/4.
// It does not equal the numeric value below; both are reported.
inline double p_dist_lower_paper(double p) {
    require_lower_domain(p, "p_dist_lower_paper");
    return 0.5 + std::sqrt(2.0 * p * (1.0 - p)) / 4.0;
}

// 1/2 + ||Z(p) - |psi_1><psi_1|||_1 / 4, which works out to 1/2 + sqrt(p(1-p))/2.
inline double p_dist_lower_numeric(double p, double phi) {
    require_lower_domain(p, "p_dist_lower_numeric");
    const ComplexMatrix diff = z_state(p).matrix() - outer(family_vector(p, 1.0 - p, phi));
    return 0.5 + 0.25 * trace_norm(diff);
}

// max - min of p_dist_lower_numeric over `samples` equally spaced phi in [0, 2 pi).
inline double phi_invariance_spread(double p, int samples) {
    if (samples < 1) throw ValidationError("phi_invariance_spread: need at least one sample");
    double lo = 2.0;
    double hi = -1.0;
    for (int k = 0; k < samples; ++k) {
        const double v = p_dist_lower_numeric(p, 2.0 * std::numbers::pi * k / samples);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

using BlochVector = std::array<double, 3>;

// rho = (I + x X + y Y + z Z) / 2
inline BlochVector bloch_vector(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw DimensionError("bloch_vector: expected a 2x2 density matrix");
    const ComplexMatrix& m = rho.matrix();
    return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

inline DensityMatrix from_bloch(const BlochVector& r) {
    ComplexMatrix m(2, 2);
    m << Complex(0.5 * (1.0 + r[2]), 0.0), Complex(0.5 * r[0], -0.5 * r[1]), Complex(0.5 * r[0], 0.5 * r[1]),
        Complex(0.5 * (1.0 - r[2]), 0.0);
    return DensityMatrix(m);
}

inline double bloch_distance(const BlochVector& a, const BlochVector& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

}  // namespace qseal::achieve
