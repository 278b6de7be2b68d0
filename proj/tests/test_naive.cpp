#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qseal/naive.hpp"

using namespace qseal;
using namespace qseal::naive;

namespace {

// Outcome string for basis index x; register 0 is the most significant bit.
Outcomes outcomes_of(Index x, int n) {
    Outcomes o(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) o[static_cast<std::size_t>(r)] = static_cast<int>((x >> (n - 1 - r)) & 1);
    return o;
}

}  // namespace

TEST(ProductState, LabelsAndValidation) {
    const ProductState s(2, 1, identity_permutation(6));
    const std::vector<QubitLabel> expected{QubitLabel::zero, QubitLabel::zero, QubitLabel::zero,
                                           QubitLabel::zero, QubitLabel::plus, QubitLabel::plus};
    EXPECT_EQ(s.register_labels(), expected);
    const ProductState t(1, 2, {2, 1, 0});
    EXPECT_EQ(t.register_labels(), (std::vector<QubitLabel>{QubitLabel::plus, QubitLabel::one, QubitLabel::one}));

    EXPECT_THROW(ProductState(0, 1, {}), ValidationError);
    EXPECT_THROW(ProductState(1, 3, identity_permutation(3)), ValidationError);
    EXPECT_THROW(ProductState(1, 1, {0, 1}), ValidationError);
    EXPECT_THROW(ProductState(1, 1, {0, 0, 1}), ValidationError);
    EXPECT_THROW(ProductState(1, 1, {0, 1, 3}), ValidationError);
}

TEST(BuildNaiveScheme, CountsAndReplay) {
    const auto [s1, s2] = build_naive_scheme(2, 11, 12);
    const auto r1 = s1.register_labels();
    const auto r2 = s2.register_labels();
    EXPECT_EQ(std::count(r1.begin(), r1.end(), QubitLabel::zero), 4);
    EXPECT_EQ(std::count(r1.begin(), r1.end(), QubitLabel::plus), 2);
    EXPECT_EQ(std::count(r2.begin(), r2.end(), QubitLabel::one), 4);
    EXPECT_EQ(std::count(r2.begin(), r2.end(), QubitLabel::plus), 2);

    const auto again = build_naive_scheme(2, 11, 12);
    EXPECT_EQ(again.first.permutation(), s1.permutation());
    EXPECT_EQ(again.second.permutation(), s2.permutation());
    EXPECT_THROW(build_naive_scheme(0, 1, 2), ValidationError);
}

TEST(RandomPermutation, IsUniformOnThreeElements) {
    RngStream rng(5);
    std::vector<int> counts(6, 0);
    const int draws = 60000;
    for (int k = 0; k < draws; ++k) {
        const auto p = random_permutation(3, rng);
        ++counts[static_cast<std::size_t>(p[0] * 2 + (p[1] > p[2] ? 1 : 0))];
    }
    for (int c : counts) EXPECT_NEAR(c, draws / 6.0, 5.0 * std::sqrt(draws / 6.0));
}

TEST(DenseState, Examples) {
    const double h = 1.0 / std::sqrt(2.0);
    const auto a = dense_state(ProductState(1, 1, identity_permutation(3))).amplitudes();
    ComplexVector ea = ComplexVector::Zero(8);
    ea(0) = h;
    ea(1) = h;
    EXPECT_LE(oracle::max_abs(a - ea), 1e-15);

    const auto b = dense_state(ProductState(1, 1, {2, 1, 0})).amplitudes();
    ComplexVector eb = ComplexVector::Zero(8);
    eb(0) = h;
    eb(4) = h;
    EXPECT_LE(oracle::max_abs(b - eb), 1e-15);

    RngStream rng(6);
    const auto c = dense_state(ProductState(3, 2, random_permutation(9, rng))).amplitudes();
    EXPECT_NEAR(c.norm(), 1.0, 1e-12);
    EXPECT_THROW(dense_state(ProductState(5, 1, identity_permutation(15))), CapacityError);
}

TEST(MajorityPovm, Structure) {
    const auto povm = majority_projector_povm(1);
    const auto& pi1 = povm[*povm.find(OutcomeLabel::pair(1, 1))].op;
    for (Index x = 0; x < 8; ++x) {
        const bool in_first = x == 0 || x == 1 || x == 2 || x == 4;
        EXPECT_EQ(pi1(x, x).real(), in_first ? 1.0 : 0.0) << x;
    }
    for (int q : {1, 2, 3}) {
        const auto p = majority_projector_povm(q);
        const auto& a = p[*p.find(OutcomeLabel::pair(1, 1))].op;
        const auto& b = p[*p.find(OutcomeLabel::pair(2, 1))].op;
        const Index d = a.rows();
        EXPECT_EQ(oracle::max_abs(a + b - identity(d)), 0.0);
        EXPECT_EQ(oracle::max_abs(a * b), 0.0);
        EXPECT_EQ(oracle::max_abs(a * a - a), 0.0);
        EXPECT_EQ(oracle::max_abs(ComplexMatrix(a.diagonal().asDiagonal()) - a), 0.0);
    }
}

TEST(VerifyNondisturbing, AllPermutationsAtQ1) {
    std::vector<int> p1 = identity_permutation(3);
    do {
        std::vector<int> p2 = identity_permutation(3);
        do {
            EXPECT_TRUE(verify_nondisturbing(ProductState(1, 1, p1), ProductState(1, 2, p2)));
        } while (std::next_permutation(p2.begin(), p2.end()));
    } while (std::next_permutation(p1.begin(), p1.end()));
}

TEST(VerifyNondisturbing, RandomPairs) {
    for (int q : {2, 3, 4})
        for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_TRUE(verify_nondisturbing(q, seed, seed + 1000));
}

TEST(VerifyNondisturbing, ProjectorOnStatesMatchesDirectApplication) {
    for (int q : {1, 2}) {
        const auto [s1, s2] = build_naive_scheme(q, 3, 4);
        const auto povm = majority_projector_povm(q);
        const auto v1 = dense_state(s1).amplitudes();
        const auto v2 = dense_state(s2).amplitudes();
        EXPECT_LE(oracle::max_abs(povm[*povm.find(OutcomeLabel::pair(1, 1))].op * v1 - v1), 1e-12);
        EXPECT_LE(oracle::max_abs(povm[*povm.find(OutcomeLabel::pair(2, 1))].op * v2 - v2), 1e-12);
    }
}

TEST(VerifyNondisturbing, WrongThresholdFails) {
    const ProductState s1(1, 1, identity_permutation(3));
    const ProductState s2(1, 2, identity_permutation(3));
    EXPECT_FALSE(verify_nondisturbing_with(s1, s2, [](int zeros) { return zeros >= 1; }));
    EXPECT_TRUE(verify_nondisturbing_with(s1, s2, [](int zeros) { return zeros >= 2; }));
}

TEST(Attack, RepairExamples) {
    const ProductState s(1, 1, identity_permutation(3));
    EXPECT_EQ(repair(s, {0, 0, 1}), (std::vector<QubitLabel>{QubitLabel::zero, QubitLabel::zero, QubitLabel::plus}));
    EXPECT_EQ(analytic_trial_fidelity(s, {0, 0, 1}), 1.0);
    EXPECT_EQ(analytic_trial_fidelity(s, {0, 0, 0}), 0.5);
    const ProductState t(1, 2, identity_permutation(3));
    EXPECT_EQ(repair(t, {1, 1, 0}), (std::vector<QubitLabel>{QubitLabel::one, QubitLabel::one, QubitLabel::plus}));
    EXPECT_EQ(analytic_trial_fidelity(t, {1, 1, 1}), 0.5);
}

TEST(Attack, DenseOverlapMatchesAnalyticFidelity) {
    for (int q : {1, 2}) {
        for (int message : {1, 2}) {
            RngStream rng(static_cast<std::uint64_t>(10 * q + message));
            const ProductState s(q, message, random_permutation(3 * q, rng));
            const auto psi = dense_state(s).amplitudes();
            const int n = 3 * q;
            double expected = 0.0;
            for (Index x = 0; x < psi.size(); ++x) {
                const double prob = std::norm(psi(x));
                if (prob == 0.0) continue;
                const auto o = outcomes_of(x, n);
                const auto repaired = dense_product(repair(s, o));
                const double overlap = std::norm(psi.dot(repaired));
                EXPECT_NEAR(overlap, analytic_trial_fidelity(s, o), 1e-10);
                expected += prob * overlap;
            }
            EXPECT_NEAR(expected, exact_mean_fidelity(q), 1e-12);
        }
    }
    EXPECT_DOUBLE_EQ(exact_mean_fidelity(1), 0.75);
    EXPECT_DOUBLE_EQ(exact_mean_fidelity(2), 0.5625);
}

TEST(Attack, MonteCarloAgreesWithExactMean) {
    for (int q : {1, 2, 3}) {
        RngStream rng(static_cast<std::uint64_t>(q));
        const ProductState s(q, 1, random_permutation(3 * q, rng));
        const auto r = simulate_qubitwise_attack(s, 100000, rng);
        EXPECT_EQ(r.trials, 100000);
        EXPECT_LE(std::abs(r.mean_fidelity - exact_mean_fidelity(q)), 5.0 * r.stderr_of_mean());
        EXPECT_EQ(std::accumulate(r.outcome_histogram.begin(), r.outcome_histogram.end(), std::int64_t{0}), 100000);
        // Zeros: 2q fixed plus Binomial(q, 1/2).
        for (int z = 0; z < 2 * q; ++z) EXPECT_EQ(r.outcome_histogram[static_cast<std::size_t>(z)], 0);
    }
}

TEST(Attack, FourPairsDetectionProbability) {
    RngStream rng(4);
    const ProductState s(4, 2, random_permutation(12, rng));
    const auto r = simulate_qubitwise_attack(s, 100000, rng);
    EXPECT_NEAR(r.mean_fidelity, 0.31640625, 0.01);
    EXPECT_NEAR(r.detection_probability(), 1.0 - 0.31640625, 0.01);
    EXPECT_EQ(detection_probability_naive(r), r.detection_probability());
}

TEST(Attack, SingleTrialAndErrors) {
    RngStream rng(7);
    const ProductState s(1, 1, identity_permutation(3));
    const auto r = simulate_qubitwise_attack(s, 1, rng);
    EXPECT_TRUE(r.mean_fidelity == 1.0 || r.mean_fidelity == 0.5);
    EXPECT_EQ(r.stderr_of_mean(), 0.0);
    EXPECT_THROW(simulate_qubitwise_attack(s, 0, rng), ValidationError);
}

TEST(Attack, ReplayIsBitIdentical) {
    const ProductState s(3, 1, identity_permutation(9));
    RngStream a(99);
    RngStream b(99);
    const auto ra = simulate_qubitwise_attack(s, 5000, a);
    const auto rb = simulate_qubitwise_attack(s, 5000, b);
    EXPECT_EQ(ra.mean_fidelity, rb.mean_fidelity);
    EXPECT_EQ(ra.fidelity_m2, rb.fidelity_m2);
    EXPECT_EQ(ra.outcome_histogram, rb.outcome_histogram);
}

TEST(Attack, MergeMatchesSingleRun) {
    const ProductState s(2, 1, identity_permutation(6));
    RngStream whole(3);
    const auto all = simulate_qubitwise_attack(s, 2000, whole);
    RngStream parts(3);
    const auto first = simulate_qubitwise_attack(s, 700, parts);
    const auto second = simulate_qubitwise_attack(s, 1300, parts);
    const auto merged = merge(first, second);
    EXPECT_EQ(merged.trials, 2000);
    EXPECT_NEAR(merged.mean_fidelity, all.mean_fidelity, 1e-13);
    EXPECT_NEAR(merged.fidelity_m2, all.fidelity_m2, 1e-9);
    EXPECT_EQ(merged.outcome_histogram, all.outcome_histogram);
    EXPECT_EQ(merge(AttackResult{}, all).mean_fidelity, all.mean_fidelity);
}

TEST(AsSealScheme, PromiseIsOne) {
    const auto [s1, s2] = build_naive_scheme(1, 1, 2);
    const auto scheme = as_seal_scheme(s1, s2);
    EXPECT_EQ(scheme.message_count(), 2);
    EXPECT_NEAR(promise_probability(scheme, 1), 1.0, 1e-12);
    EXPECT_NEAR(promise_probability(scheme, 2), 1.0, 1e-12);
    EXPECT_EQ(scheme.coarse_povm().size(), 2u);
}
