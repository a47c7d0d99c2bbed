#include <gtest/gtest.h>

#include <cmath>

#include "moments/errors.hpp"
#include "moments/fixtures.hpp"
#include "moments/quadratic.hpp"
#include "support.hpp"

using namespace moments;
using namespace moments::testing;

namespace {

const ToleranceConfig kCfg;

Polynomial unit_ball(int n) {
    Polynomial p = Polynomial::constant(n, 1.0);
    for (int i = 0; i < n; ++i) p.add_term(MultiIndex::unit(n, i) + MultiIndex::unit(n, i), -1.0);
    return p;
}

QuadraticConstraint parabola() { return split_quadratic(Polynomial(2, {{{0, 1}, 1}, {{2, 0}, -1}})); }

AtomicMeasure two_point(Vector a, Vector b) {
    AtomicMeasure mu;
    mu.add(std::move(a), 0.5);
    mu.add(std::move(b), 0.5);
    return mu;
}

}  // namespace

TEST(SplitQuadratic, UnitBall) {
    const auto q = split_quadratic(unit_ball(2));
    EXPECT_EQ(q.q0, 1);
    EXPECT_EQ(q.q1, (Vector{0, 0}));
    EXPECT_EQ(q.Q2(0, 0), -1);
    EXPECT_EQ(q.Q2(1, 1), -1);
    EXPECT_EQ(q.Q2(0, 1), 0);
}

TEST(SplitQuadratic, Parabola) {
    const auto q = parabola();
    EXPECT_EQ(q.q0, 0);
    EXPECT_EQ(q.q1, (Vector{0, 0.5}));
    EXPECT_EQ(q.Q2(0, 0), -1);
    EXPECT_EQ(q.Q2(1, 1), 0);
}

TEST(SplitQuadratic, CrossTermIsSymmetrized) {
    const auto q = split_quadratic(Polynomial(2, {{{1, 1}, 1}}));
    EXPECT_EQ(q.Q2(0, 1), 0.5);
    EXPECT_EQ(q.Q2(1, 0), 0.5);
}

TEST(SplitQuadratic, RejectsCubic) { EXPECT_THROW(split_quadratic(Polynomial(1, {{{3}, 1}})), InvalidInput); }

TEST(QuadraticConstraint, AgreesWithPolynomialAndBorderedForm) {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + trial % 4;
        const Polynomial p = Polynomial::from_vector(n, 2, random_vector(rng, basis_size(n, 2)));
        const auto q = split_quadratic(p);
        for (int k = 0; k < 10; ++k) {
            const Vector x = random_vector(rng, static_cast<std::size_t>(n), 2.0);
            const double ref = eval_poly(p, x);
            EXPECT_NEAR(q(x), ref, 1e-12 * (1 + std::abs(ref)));
            Vector b{1.0};
            b.insert(b.end(), x.begin(), x.end());
            EXPECT_NEAR(dot(b, q.Q * b), ref, 1e-12 * (1 + std::abs(ref)));
            EXPECT_NEAR(homogenized_value(q, 1.0, x), ref, 1e-12 * (1 + std::abs(ref)));
        }
        const Vector a = random_vector(rng, static_cast<std::size_t>(n));
        const Vector x = random_vector(rng, static_cast<std::size_t>(n));
        EXPECT_NEAR(q.shifted(a)(x), q(add(x, a)), 1e-11 * (1 + std::abs(q(add(x, a)))));
        EXPECT_EQ(q.negated()(x), -q(x));
    }
}

TEST(SolveUnconstrained, SingularUnivariateGivesOriginAtom) {
    const auto mu = solve_unconstrained(MomentSequence(1, 2, {1, 0, 0}), kCfg);
    ASSERT_EQ(mu.size(), 1u);
    EXPECT_NEAR(mu.atoms[0][0], 0.0, 1e-12);
    EXPECT_NEAR(mu.weights[0], 1.0, 1e-12);
}

TEST(SolveUnconstrained, TwoAtomsForUnitVariance) {
    const MomentSequence y(1, 2, {1, 0, 1});
    const auto mu = solve_unconstrained(y, kCfg);
    EXPECT_EQ(mu.size(), 2u);
    EXPECT_TRUE(verify_measure(y, mu, kCfg).pass);
}

TEST(SolveUnconstrained, RankManyAtomsInFiveVariables) {
    Rng rng(42);
    const auto truth = random_measure(rng, 5, 4);
    const auto y = moments_of_measure(truth, 5, 2);
    const auto mu = solve_unconstrained(y, kCfg);
    EXPECT_EQ(mu.size(), 4u);
    for (const auto& a : monomial_basis(5, 2)) EXPECT_NEAR(brute_moment(mu, a), y[a], 1e-9 * (1 + std::abs(y[a])));
}

TEST(SolveUnconstrained, IndefiniteIsNoMeasure) {
    EXPECT_THROW(solve_unconstrained(MomentSequence(1, 2, {1, 2, 1}), kCfg), NoMeasureError);
    EXPECT_THROW(solve_unconstrained(MomentSequence(1, 2, {0, 0, 1}), kCfg), InvalidInput);
}

TEST(NaiveUnconstrained, SingleAtomPath) {
    AtomicMeasure mu;
    mu.add({1.5, -2.0}, 3.0);
    const auto r = naive_unconstrained(moments_of_measure(mu, 2, 2), kCfg);
    EXPECT_TRUE(r.single_atom);
    ASSERT_EQ(r.measure.size(), 1u);
    EXPECT_NEAR(r.measure.atoms[0][1], -2.0, 1e-12);
}

TEST(NaiveUnconstrained, RankThreeGivesFourAtoms) {
    Rng rng(43);
    const auto y = moments_of_measure(random_measure(rng, 2, 5), 2, 2);
    const auto r = naive_unconstrained(y, kCfg);
    EXPECT_EQ(r.measure.size(), 4u);
    EXPECT_TRUE(verify_measure(y, r.measure, kCfg).pass);
}

TEST(NaiveUnconstrained, AgreesWithRankOneConstruction) {
    Rng rng(44);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 6;
        const auto y = moments_of_measure(random_measure(rng, n, 1 + static_cast<std::size_t>(trial % 7)), n, 2);
        const auto a = moments_of_measure(solve_unconstrained(y, kCfg), n, 2);
        const auto b = moments_of_measure(naive_unconstrained(y, kCfg).measure, n, 2);
        EXPECT_LE(norm_inf(sub(a.values(), b.values())), 2 * kCfg.moment_threshold(y));
    }
}

TEST(SolveDegree1, MeanAtom) {
    const auto mu = solve_degree1(MomentSequence(2, 1, {2, 2, 4}));
    ASSERT_EQ(mu.size(), 1u);
    EXPECT_EQ(mu.atoms[0], (Vector{1, 2}));
    EXPECT_EQ(mu.weights[0], 2);
    const auto d0 = solve_degree1(MomentSequence(3, 1, {1, 0, 0, 0}));
    EXPECT_EQ(d0.atoms[0], (Vector{0, 0, 0}));
    EXPECT_THROW(solve_degree1(MomentSequence(1, 1, {0, 1})), NoMeasureError);
}

TEST(SolveCompact, AtomsOnUnitCircle) {
    const auto q = split_quadratic(unit_ball(2));
    const auto y = moments_of_measure(two_point({1, 0}, {0, 1}), 2, 2);
    const auto mu = solve_compact_k(y, q, ConstraintMode::Equality, kCfg);
    EXPECT_TRUE(verify_measure(y, mu, kCfg).pass);
    for (const auto& a : mu.atoms) EXPECT_NEAR(q(a), 0.0, 1e-7);
}

TEST(SolveCompact, InequalityInsideBall) {
    const auto q = split_quadratic(unit_ball(2));
    const auto y = moments_of_measure(two_point({0.5, 0}, {0, 0.5}), 2, 2);
    const auto mu = solve_compact_k(y, q, ConstraintMode::Inequality, kCfg);
    EXPECT_TRUE(verify_measure(y, mu, kCfg).pass);
    for (const auto& a : mu.atoms) EXPECT_GE(q(a), -1e-7);
}

TEST(SolveCompact, WrongSignIsNoMeasure) {
    const auto q = split_quadratic(unit_ball(2));
    AtomicMeasure mu;
    mu.add({2, 0}, 1.0);
    EXPECT_THROW(solve_compact_k(moments_of_measure(mu, 2, 2), q, ConstraintMode::Equality, kCfg), NoMeasureError);
    EXPECT_THROW(solve_compact_k(moments_of_measure(mu, 2, 2), q, ConstraintMode::Inequality, kCfg), NoMeasureError);
}

TEST(SolveCompact, RequiresNegativeDefiniteQuadraticPart) {
    EXPECT_THROW(solve_compact_k(parabola_sequence(0), parabola(), ConstraintMode::Equality, kCfg), PreconditionError);
}

TEST(DecideNoncompact, ParabolaCounterexampleIsApproximableOnly) {
    for (auto mode : {ConstraintMode::Equality, ConstraintMode::Inequality}) {
        const auto v = decide_noncompact(parabola_sequence(0), parabola(), mode, kCfg);
        EXPECT_EQ(v.status, Status::ApproximableOnly);
        EXPECT_TRUE(v.approximable);
        EXPECT_FALSE(v.measure);
    }
}

TEST(DecideNoncompact, WrongRieszSignIsNoMeasure) {
    MomentSequence y(2, 2);
    y[MultiIndex({0, 0})] = 1;
    y[MultiIndex({2, 0})] = 1;
    y[MultiIndex({0, 2})] = 1;
    const auto v = decide_noncompact(y, parabola(), ConstraintMode::Equality, kCfg);
    EXPECT_EQ(v.status, Status::NoMeasure);
}

TEST(DecideNoncompact, ThreeParabolaPointsAreConstructed) {
    AtomicMeasure truth;
    truth.add({0, 0}, 1.0 / 3);
    truth.add({1, 1}, 1.0 / 3);
    truth.add({-1, 1}, 1.0 / 3);
    const auto y = moments_of_measure(truth, 2, 2);
    const auto v = decide_noncompact(y, parabola(), ConstraintMode::Equality, kCfg);
    ASSERT_TRUE(v.status == Status::MeasureConstructed || v.status == Status::ExistsNonConstructive);
    if (v.measure) {
        EXPECT_TRUE(verify_measure(y, *v.measure, kCfg).pass);
        for (const auto& a : v.measure->atoms) EXPECT_NEAR(parabola()(a), 0.0, 1e-7 * (1 + dot(a, a)));
    }
}

TEST(DecideNoncompact, EmptyConstraintSetIsRejected) {
    const auto q = split_quadratic(Polynomial(1, {{{2}, 1}, {{0}, 1}}));
    EXPECT_THROW(decide_noncompact(MomentSequence(1, 2, {1, 0, 1}), q, ConstraintMode::Equality, kCfg), InvalidInput);
}

TEST(ApproxSequence, ParabolaFamilyIsReproduced) {
    const double eps = 1.0 / 16;
    const auto r = approx_sequence(parabola_sequence(0), parabola(), ConstraintMode::Equality, eps, kCfg);
    const auto expected = parabola_sequence(eps);
    EXPECT_EQ(r.escaped, 1u);
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(r.perturbed.values()[i], expected.values()[i], 1e-15);
    const auto w = parabola_witness(eps);
    ASSERT_EQ(r.witness.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(r.witness.weights[i], w.weights[i], 1e-15);
        EXPECT_NEAR(r.witness.atoms[i][0], w.atoms[i][0], 1e-14);
        EXPECT_NEAR(r.witness.atoms[i][1], w.atoms[i][1], 1e-14);
    }
}

TEST(ApproxSequence, DeviationsShrinkAlongPowersOfFour) {
    double last = INFINITY;
    for (int j = 2; j <= 8; ++j) {
        const double eps = std::pow(4.0, -j);
        const auto r = approx_sequence(parabola_sequence(0), parabola(), ConstraintMode::Equality, eps, kCfg);
        EXPECT_LT(r.deviation, last);
        EXPECT_TRUE(verify_measure(r.perturbed, r.witness, kCfg).pass);
        for (const auto& a : r.witness.atoms) EXPECT_NEAR(parabola()(a), 0.0, 1e-9 * (1 + dot(a, a)));
        last = r.deviation;
    }
}

TEST(ApproxSequence, SolvableInputIsAFixedPoint) {
    const auto q = split_quadratic(unit_ball(2));
    const auto y = moments_of_measure(two_point({1, 0}, {0, 1}), 2, 2);
    const auto r = approx_sequence(y, q, ConstraintMode::Equality, 0.01, kCfg);
    EXPECT_EQ(r.deviation, 0.0);
    EXPECT_EQ(r.perturbed.values(), y.values());
    EXPECT_TRUE(verify_measure(y, r.witness, kCfg).pass);
}

TEST(SLemmaCert, IdenticalFunctions) {
    const auto q = split_quadratic(unit_ball(2));
    const auto r = s_lemma_cert(q, q, kCfg);
    EXPECT_TRUE(r.pencil.feasible);
    EXPECT_GE(min_eigenvalue(q.Q - q.Q * r.pencil.t), -1e-8);
}

TEST(SLemmaCert, GloballyNonnegative) {
    const auto f = split_quadratic(Polynomial(2, {{{2, 0}, 1}}));
    const auto r = s_lemma_cert(f, split_quadratic(unit_ball(2)), kCfg);
    EXPECT_TRUE(r.pencil.feasible);
}

TEST(SLemmaCert, NegatedConstraintYieldsViolation) {
    const auto f = split_quadratic(Polynomial(1, {{{0}, -1}, {{2}, 1}}));
    const auto q = split_quadratic(Polynomial(1, {{{0}, 1}, {{2}, -1}}));
    const auto r = s_lemma_cert(f, q, kCfg);
    EXPECT_FALSE(r.pencil.feasible);
    ASSERT_TRUE(r.violating_point);
    EXPECT_GE(q(*r.violating_point), -1e-9);
    EXPECT_LT(f(*r.violating_point), 0.0);
}

TEST(EqLemmaCert, HomogeneousSquare) {
    const auto q = split_quadratic(Polynomial(1, {{{2}, 1}, {{0}, -1}}));
    const auto f = split_quadratic(Polynomial(1, {{{2}, 1}, {{0}, -1}}));
    EXPECT_TRUE(eq_lemma_cert(f, q, kCfg).pencil.feasible);
}

TEST(EqLemmaCert, ParabolaAgainstItself) {
    EXPECT_TRUE(eq_lemma_cert(parabola(), parabola(), kCfg).pencil.feasible);
}

TEST(EqLemmaCert, MissingPositiveWitness) {
    const auto f = split_quadratic(Polynomial(2, {{{1, 1}, 1}}));
    const auto q = split_quadratic(Polynomial(2, {{{2, 0}, -1}}));
    try {
        eq_lemma_cert(f, q, kCfg);
        FAIL() << "expected a precondition error";
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find("missing witness"), std::string::npos);
    }
}

TEST(EpsCert, SaddleWithUnitEps) {
    const auto f = split_quadratic(Polynomial(2, {{{1, 1}, 1}}));
    const auto q = split_quadratic(Polynomial(2, {{{2, 0}, -1}}));
    const auto r = eps_cert(f, q, CertMode::E, 1.0, kCfg);
    EXPECT_TRUE(r.pencil.feasible);
    EXPECT_GE(min_eigenvalue(f.Q + Matrix::identity(3) - q.Q * r.pencil.t), -1e-8);
}

TEST(EpsCert, GloballyNonnegativeSMode) {
    const auto f = split_quadratic(Polynomial(2, {{{2, 0}, 1}, {{0, 2}, 1}}));
    EXPECT_TRUE(eps_cert(f, parabola(), CertMode::S, 0.01, kCfg).pencil.feasible);
}

TEST(EpsCert, NegativeConstantIsInfeasible) {
    const auto f = split_quadratic(Polynomial::constant(2, -1));
    const auto r = eps_cert(f, split_quadratic(unit_ball(2)), CertMode::S, 0.1, kCfg);
    EXPECT_FALSE(r.pencil.feasible);
    ASSERT_TRUE(r.violating_point);
    EXPECT_LT(f(*r.violating_point), 0.0);
}

TEST(WitnessSearch, UnitBall) {
    const auto q = split_quadratic(unit_ball(2));
    const auto pos = witness_search(q, WitnessTarget::Positive);
    const auto neg = witness_search(q, WitnessTarget::Negative);
    const auto zero = witness_search(q, WitnessTarget::Zero);
    ASSERT_TRUE(pos && neg && zero);
    EXPECT_GT(q(*pos), 0);
    EXPECT_LT(q(*neg), 0);
    EXPECT_NEAR(norm2(*zero), 1.0, 1e-12);
}

TEST(WitnessSearch, NegativeSquareHasNoPositivePoint) {
    EXPECT_FALSE(witness_search(split_quadratic(Polynomial(2, {{{2, 0}, -1}})), WitnessTarget::Positive));
}

TEST(WitnessSearch, ParabolaZero) {
    const auto z = witness_search(parabola(), WitnessTarget::Zero);
    ASSERT_TRUE(z);
    EXPECT_NEAR((*z)[1], (*z)[0] * (*z)[0], 1e-9 * (1 + dot(*z, *z)));
}

// Compact case: atoms drawn on or inside the unit sphere come back on the constraint set.
TEST(CompactProperty, RecoveredAtomsSatisfyConstraint) {
    Rng rng(45);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 4;
        const bool on_sphere = trial % 2 == 0;
        AtomicMeasure mu;
        for (int i = 0; i < 1 + trial % 4; ++i) {
            Vector x = random_vector(rng, static_cast<std::size_t>(n));
            x = scale(x, (on_sphere ? 1.0 : uniform(rng, 0.1, 0.9)) / norm2(x));
            mu.add(std::move(x), uniform(rng, 0.5, 2));
        }
        const auto q = split_quadratic(unit_ball(n));
        const auto mode = on_sphere ? ConstraintMode::Equality : ConstraintMode::Inequality;
        const auto y = moments_of_measure(mu, n, 2);
        const auto got = solve_compact_k(y, q, mode, kCfg);
        EXPECT_TRUE(verify_measure(y, got, kCfg).pass);
        for (const auto& a : got.atoms) {
            if (on_sphere)
                EXPECT_LE(std::abs(q(a)), 1e-7);
            else
                EXPECT_GE(q(a), -1e-7);
        }
    }
}
