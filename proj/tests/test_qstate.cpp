#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qseal/qstate.hpp"

using namespace qseal;

namespace {

ComplexMatrix diag2(double a, double b) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

DensityMatrix z(double x) { return DensityMatrix(diag2(x, 1.0 - x)); }

PureState plus() { return PureState::normalized(ComplexVector::Ones(2)); }

ComplexMatrix plus_projector() { return ComplexMatrix::Constant(2, 2, Complex(0.5, 0.0)); }
ComplexMatrix minus_projector() {
    ComplexMatrix m(2, 2);
    m << 0.5, -0.5, -0.5, 0.5;
    return m;
}

Povm pm_povm() {
    return Povm({{OutcomeLabel::simple(0), plus_projector()}, {OutcomeLabel::simple(1), minus_projector()}});
}

Povm trivial_povm(Index d) { return Povm({{OutcomeLabel::simple(0), identity(d)}}); }

// Random POVM with n elements by normalizing Wishart matrices with S^-1/2.
Povm random_povm(Index d, int n, RngStream& rng) {
    std::vector<ComplexMatrix> a;
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (int k = 0; k < n; ++k) {
        a.push_back(oracle::random_psd(d, rng));
        s += a.back();
    }
    const auto eig = hermitian_eigendecomp(s);
    const ComplexMatrix inv_root =
        eig.eigenvectors * eig.eigenvalues.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() *
        eig.eigenvectors.adjoint();
    std::vector<PovmElement> elems;
    for (int k = 0; k < n; ++k) elems.push_back({OutcomeLabel::simple(k), inv_root * a[k] * inv_root});
    return Povm(std::move(elems));
}

}  // namespace

TEST(States, PureStateValidation) {
    EXPECT_THROW(PureState(ComplexVector::Ones(2)), ValidationError);
    EXPECT_NO_THROW(plus());
    EXPECT_THROW(PureState::normalized(ComplexVector::Ones(4), Bipartition{3, 2}), DimensionError);
}

TEST(States, DensityMatrixValidation) {
    EXPECT_THROW(DensityMatrix(diag2(0.5, 0.6)), ValidationError);
    EXPECT_THROW(DensityMatrix(diag2(1.5, -0.5)), ValidationError);
    ComplexMatrix skew = diag2(0.5, 0.5);
    skew(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix{skew}, ValidationError);
}

TEST(Densify, Examples) {
    EXPECT_LE(oracle::max_abs(densify(basis_state(2, 0)).matrix() - diag2(1, 0)), 1e-15);
    EXPECT_LE(oracle::max_abs(densify(plus()).matrix() - plus_projector()), 1e-15);
    ComplexVector v(2);
    v << 1.0, Complex(0.0, 1.0);
    ComplexMatrix expected(2, 2);
    expected << 0.5, Complex(0, -0.5), Complex(0, 0.5), 0.5;
    EXPECT_LE(oracle::max_abs(densify(PureState::normalized(v)).matrix() - expected), 1e-15);
}

TEST(Povm, CanonicalOrderAndValidation) {
    const Povm p({{OutcomeLabel::pair(2, 1), diag2(0, 1)},
                  {OutcomeLabel::pair(1, 2), diag2(0.5, 0)},
                  {OutcomeLabel::pair(1, 1), diag2(0.5, 0)}});
    EXPECT_EQ(p[0].label, OutcomeLabel::pair(1, 1));
    EXPECT_EQ(p[1].label, OutcomeLabel::pair(1, 2));
    EXPECT_EQ(p[2].label, OutcomeLabel::pair(2, 1));
    EXPECT_LT(OutcomeLabel::simple(1), OutcomeLabel::pair(1, 1));
    EXPECT_LT(OutcomeLabel::pair(1, 9), OutcomeLabel::simple(2));

    EXPECT_THROW(Povm({{OutcomeLabel::simple(0), diag2(0.5, 0.5)}}), ValidationError);  // sum != I
    EXPECT_THROW(Povm({{OutcomeLabel::simple(0), diag2(1.5, 1)}, {OutcomeLabel::simple(1), diag2(-0.5, 0)}}),
                 ValidationError);  // not PSD
    EXPECT_THROW(Povm({{OutcomeLabel::simple(0), diag2(1, 0)}, {OutcomeLabel::simple(0), diag2(0, 1)}}),
                 ValidationError);  // duplicate
    EXPECT_THROW(Povm({{OutcomeLabel::simple(0), diag2(1, 0)}, {OutcomeLabel::simple(1), identity(3)}}),
                 DimensionError);
    // A sum off by more than 1e-9 is rejected rather than renormalized.
    EXPECT_THROW(Povm({{OutcomeLabel::simple(0), diag2(1, 0)}, {OutcomeLabel::simple(1), diag2(0, 1 + 2e-9)}}),
                 ValidationError);
}

TEST(MeasureProbabilities, Examples) {
    const Povm basis = standard_basis_povm(2);
    auto probs = measure_probabilities(densify(plus()), basis);
    EXPECT_NEAR(probs[0].probability, 0.5, 1e-15);
    EXPECT_NEAR(probs[1].probability, 0.5, 1e-15);

    probs = measure_probabilities(densify(basis_state(2, 0)), basis);
    EXPECT_NEAR(probs[0].probability, 1.0, 1e-15);
    EXPECT_NEAR(probs[1].probability, 0.0, 1e-15);

    const DensityMatrix rho = z(0.3);
    probs = measure_probabilities(rho, pm_povm());
    EXPECT_NEAR(probs[0].probability, oracle::trace_product(plus_projector(), rho.matrix()).real(), 1e-15);
    EXPECT_NEAR(probs[0].probability, 0.5, 1e-15);
    EXPECT_NEAR(probs[1].probability, 0.5, 1e-15);
}

TEST(MeasureProbabilities, SumToOneOnRandomInputs) {
    RngStream rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const Index d = 2 + static_cast<Index>(rng.uniform_index(6));
        const Povm povm = random_povm(d, 2 + static_cast<int>(rng.uniform_index(4)), rng);
        const DensityMatrix rho(oracle::random_density(d, rng));
        double sum = 0.0;
        for (const auto& p : measure_probabilities(rho, povm)) {
            EXPECT_GE(p.probability, 0.0);
            EXPECT_LE(p.probability, 1.0);
            sum += p.probability;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(MeasureProbabilities, DimensionMismatch) {
    EXPECT_THROW(measure_probabilities(z(0.5), standard_basis_povm(3)), DimensionError);
    EXPECT_THROW(standard_implementation(z(0.5), standard_basis_povm(3)), DimensionError);
    EXPECT_THROW(unknown_outcome_state(z(0.5), standard_basis_povm(3)), DimensionError);
}

TEST(StandardImplementation, ProjectiveCollapse) {
    const auto outs = standard_implementation(densify(plus()), standard_basis_povm(2));
    ASSERT_EQ(outs.size(), 2u);
    EXPECT_NEAR(outs[0].probability, 0.5, 1e-15);
    ASSERT_TRUE(outs[0].post_state.has_value());
    EXPECT_LE(oracle::max_abs(outs[0].post_state->matrix() - diag2(1, 0)), 1e-15);
}

TEST(StandardImplementation, TrivialMeasurementLeavesState) {
    RngStream rng(4);
    const DensityMatrix rho(oracle::random_density(3, rng));
    const auto outs = standard_implementation(rho, trivial_povm(3));
    ASSERT_EQ(outs.size(), 1u);
    EXPECT_NEAR(outs[0].probability, 1.0, 1e-12);
    EXPECT_LE(oracle::max_abs(outs[0].post_state->matrix() - rho.matrix()), 1e-12);
}

TEST(StandardImplementation, ScaledIdentityElements) {
    const Povm p({{OutcomeLabel::simple(0), diag2(0.7, 0.7)}, {OutcomeLabel::simple(1), diag2(0.3, 0.3)}});
    for (const auto& o : standard_implementation(z(0.5), p)) {
        ASSERT_TRUE(o.post_state.has_value());
        EXPECT_LE(oracle::max_abs(o.post_state->matrix() - diag2(0.5, 0.5)), 1e-15);
    }
}

TEST(StandardImplementation, ZeroProbabilityHasNoPostState) {
    const auto outs = standard_implementation(densify(basis_state(2, 0)), standard_basis_povm(2));
    EXPECT_EQ(outs[1].probability, 0.0);
    EXPECT_FALSE(outs[1].post_state.has_value());
}

TEST(StandardImplementation, ProjectiveRemeasurementRepeats) {
    RngStream rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho(oracle::random_density(4, rng));
        // Projective measurement in a random orthonormal basis.
        const auto eig = hermitian_eigendecomp(oracle::random_hermitian(4, rng));
        std::vector<PovmElement> elems;
        for (Index k = 0; k < 4; ++k) elems.push_back({OutcomeLabel::simple(static_cast<int>(k)), outer(eig.eigenvectors.col(k))});
        const Povm povm(std::move(elems));
        const auto outs = standard_implementation(rho, povm);
        for (std::size_t k = 0; k < outs.size(); ++k) {
            if (!outs[k].post_state) continue;
            const auto again = measure_probabilities(*outs[k].post_state, povm);
            EXPECT_NEAR(again[k].probability, 1.0, 1e-10);
        }
    }
}

TEST(UnknownOutcome, Examples) {
    EXPECT_LE(oracle::max_abs(unknown_outcome_state(densify(plus()), standard_basis_povm(2)).matrix() - identity(2) / 2.0),
              1e-15);
    RngStream rng(8);
    const DensityMatrix rho(oracle::random_density(3, rng));
    EXPECT_LE(oracle::max_abs(unknown_outcome_state(rho, trivial_povm(3)).matrix() - rho.matrix()), 1e-12);

    // Explicit 2x2 sum: P+ Z P+ + P- Z P-, with sqrt(P) = P for projectors.
    const ComplexMatrix zm = diag2(0.3, 0.7);
    const ComplexMatrix expected =
        plus_projector() * zm * plus_projector() + minus_projector() * zm * minus_projector();
    const ComplexMatrix got = unknown_outcome_state(z(0.3), pm_povm()).matrix();
    EXPECT_LE(oracle::max_abs(got - expected), 1e-15);
    EXPECT_LE(oracle::max_abs(got - identity(2) / 2.0), 1e-15);
}

TEST(UnknownOutcome, EqualsWeightedMixtureOfOutcomes) {
    RngStream rng(10);
    for (int trial = 0; trial < 25; ++trial) {
        const Index d = 2 + static_cast<Index>(rng.uniform_index(7));
        const Povm povm = random_povm(d, 2 + static_cast<int>(rng.uniform_index(4)), rng);
        const DensityMatrix rho(oracle::random_density(d, rng, 1 + static_cast<Index>(rng.uniform_index(d))));
        ComplexMatrix mix = ComplexMatrix::Zero(d, d);
        for (const auto& o : standard_implementation(rho, povm))
            if (o.post_state) mix += o.probability * o.post_state->matrix();
        EXPECT_LE(oracle::max_abs(unknown_outcome_state(rho, povm).matrix() - mix), 1e-10);
    }
}

TEST(CoarseGrain, Examples) {
    RngStream rng(12);
    ComplexMatrix e = oracle::random_psd(2, rng);
    e /= 2.0 * hermitian_eigendecomp(e).eigenvalues.maxCoeff();
    const Povm single = coarse_grain(Povm({{OutcomeLabel::pair(1, 1), e}, {OutcomeLabel::pair(1, 2), identity(2) - e}}));
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0].label, OutcomeLabel::simple(1));
    EXPECT_LE(oracle::max_abs(single[0].op - identity(2)), 1e-15);

    const Povm already = coarse_grain(Povm({{OutcomeLabel::pair(1, 1), diag2(1, 0)}, {OutcomeLabel::pair(2, 1), diag2(0, 1)}}));
    ASSERT_EQ(already.size(), 2u);
    EXPECT_EQ(already[0].op, diag2(1, 0));
    EXPECT_EQ(already[1].op, diag2(0, 1));

    const Povm three = coarse_grain(Povm({{OutcomeLabel::pair(1, 1), diag2(0.5, 0)},
                                          {OutcomeLabel::pair(1, 2), diag2(0.5, 0)},
                                          {OutcomeLabel::pair(2, 1), diag2(0, 1)}}));
    ASSERT_EQ(three.size(), 2u);
    EXPECT_EQ(three[0].op, diag2(1, 0));
    EXPECT_EQ(three[1].op, diag2(0, 1));
}

TEST(CoarseGrain, RejectsSimpleLabels) {
    EXPECT_THROW(coarse_grain(standard_basis_povm(2)), ValidationError);
}

TEST(CoarseGrain, OutputSumsToIdentity) {
    RngStream rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const Index d = 2 + static_cast<Index>(rng.uniform_index(5));
        const Povm fine = random_povm(d, 6, rng);
        std::vector<PovmElement> relabeled;
        for (std::size_t k = 0; k < fine.size(); ++k)
            relabeled.push_back({OutcomeLabel::pair(1 + static_cast<int>(k % 3), static_cast<int>(k)), fine[k].op});
        const Povm coarse = coarse_grain(Povm(std::move(relabeled)));
        EXPECT_EQ(coarse.size(), 3u);
        ComplexMatrix sum = ComplexMatrix::Zero(d, d);
        for (const auto& e : coarse.elements()) sum += e.op;
        EXPECT_LE(oracle::max_abs(sum - identity(d)), 1e-9);
    }
}

TEST(Helstrom, Examples) {
    EXPECT_NEAR(helstrom_probability(z(0.3), z(0.3)), 0.5, 1e-15);
    EXPECT_NEAR(helstrom_probability(z(1.0), z(0.0)), 1.0, 1e-15);
    const ComplexMatrix diff = diag2(1, 0) - plus_projector();
    const double expected = 0.5 + 0.25 * oracle::trace_norm2(diff);
    EXPECT_NEAR(expected, 0.5 + std::sqrt(2.0) / 4.0, 1e-15);
    EXPECT_NEAR(helstrom_probability(z(1.0), densify(plus())), expected, 1e-14);
    EXPECT_NEAR(helstrom_probability(z(1.0), densify(plus())), 0.853553, 1e-6);
    EXPECT_THROW(helstrom_probability(z(0.5), DensityMatrix(identity(3) / 3.0)), DimensionError);
}

TEST(Helstrom, SymmetricAndOneOnOrthogonalSupports) {
    RngStream rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix a(oracle::random_density(4, rng));
        const DensityMatrix b(oracle::random_density(4, rng));
        const double ab = helstrom_probability(a, b);
        EXPECT_NEAR(ab, helstrom_probability(b, a), 1e-12);
        EXPECT_GE(ab, 0.5);
        EXPECT_LE(ab, 1.0);

        // Supports on the first two and last two vectors of a random basis.
        const auto basis = hermitian_eigendecomp(oracle::random_hermitian(4, rng)).eigenvectors;
        const ComplexMatrix u = basis.leftCols(2) * oracle::random_density(2, rng) * basis.leftCols(2).adjoint();
        const ComplexMatrix v = basis.rightCols(2) * oracle::random_density(2, rng) * basis.rightCols(2).adjoint();
        EXPECT_NEAR(helstrom_probability(DensityMatrix(u), DensityMatrix(v)), 1.0, 1e-10);
    }
}

TEST(SampleOutcome, EigenstateAlwaysSameOutcome) {
    RngStream rng(1);
    const auto rho = densify(basis_state(2, 0));
    for (int k = 0; k < 1000; ++k) EXPECT_EQ(sample_outcome(rho, standard_basis_povm(2), rng).label, OutcomeLabel::simple(0));
}

TEST(SampleOutcome, FrequencyMatchesProbability) {
    RngStream rng(42);
    const auto rho = densify(plus());
    const Povm povm = standard_basis_povm(2);
    int zeros = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const auto o = sample_outcome(rho, povm, rng);
        zeros += o.label == OutcomeLabel::simple(0);
        ASSERT_TRUE(o.post_state.has_value());
    }
    EXPECT_NEAR(static_cast<double>(zeros) / n, 0.5, 0.01);
}

TEST(SampleOutcome, SeedReplay) {
    const auto rho = DensityMatrix(identity(3) / 3.0);
    const Povm povm = standard_basis_povm(3);
    RngStream a(77), b(77);
    for (int k = 0; k < 500; ++k) EXPECT_EQ(sample_outcome(rho, povm, a).label, sample_outcome(rho, povm, b).label);
}
