#include <gtest/gtest.h>

#include <cmath>

#include "moments/curve_psi.hpp"
#include "moments/errors.hpp"
#include "moments/fixtures.hpp"
#include "moments/quadratic.hpp"
#include "moments/symlin.hpp"
#include "support.hpp"

using namespace moments;
using namespace moments::testing;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

MomentMatrix robinson_m3() { return moment_matrix(load_fixture("ex2_10_robinson").problem->sequence(), 3); }

// Distance from v to span(basis), basis orthonormalized on the fly.
double distance_to_span(const Vector& v, std::vector<Vector> basis) {
    std::vector<Vector> q;
    for (auto b : basis) {
        for (const auto& e : q) b = sub(b, scale(e, dot(b, e)));
        const double nb = norm2(b);
        if (nb > 1e-12) q.push_back(scale(b, 1.0 / nb));
    }
    Vector r = v;
    for (const auto& e : q) r = sub(r, scale(e, dot(r, e)));
    return norm2(r);
}

}  // namespace

TEST(SymEigen, Identity) {
    const auto e = sym_eigen(Matrix::identity(3));
    for (double v : e.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(SymEigen, DiagonalSortedDescending) {
    const auto e = sym_eigen(Matrix::diagonal({-1, 2}));
    EXPECT_DOUBLE_EQ(e.values[0], 2);
    EXPECT_DOUBLE_EQ(e.values[1], -1);
    EXPECT_DOUBLE_EQ(std::abs(e.vectors(1, 0)), 1.0);
    EXPECT_DOUBLE_EQ(std::abs(e.vectors(0, 1)), 1.0);
}

TEST(SymEigen, RejectsNonFinite) {
    Matrix a = Matrix::identity(2);
    a(0, 1) = a(1, 0) = std::nan("");
    EXPECT_THROW(sym_eigen(a), InvalidInput);
}

TEST(SymEigen, ReconstructionOrthogonalityAndOracle) {
    Rng rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 12);
        const Matrix a = random_symmetric(rng, n);
        const auto e = sym_eigen(a);
        const Matrix recon = e.vectors * Matrix::diagonal(e.values) * e.vectors.transpose();
        EXPECT_LE((a - recon).frobenius_norm(), 1e-10 * (1 + a.frobenius_norm()));
        EXPECT_LE(max_abs_diff(e.vectors.transpose() * e.vectors, Matrix::identity(n)), 1e-10);
        const auto ref = oracle_eigenvalues(a);
        for (std::size_t i = 0; i < n; ++i)
            EXPECT_NEAR(e.values[i], ref(static_cast<Eigen::Index>(n - 1 - i)), 1e-10 * (1 + std::abs(ref(0))));
    }
}

TEST(SymEigen, RobinsonHasTwoZeroEigenvalues) {
    const auto m = robinson_m3();
    const auto st = psd_status(m.entries, ToleranceConfig{});
    EXPECT_EQ(st.rank, 8u);
    EXPECT_EQ(oracle_rank(m.entries), 8u);
}

TEST(PsdStatus, ThreePointQuartic) {
    const auto st = psd_status(moment_matrix(quartic_ab_sequence(1, 3), 2).entries, ToleranceConfig{});
    EXPECT_EQ(st.kind, PsdClass::PositiveSemidefiniteSingular);
    EXPECT_EQ(st.rank, 4u);
}

TEST(PsdStatus, IndefiniteTwoByTwo) {
    EXPECT_EQ(psd_status(Matrix{{1, 2}, {2, 1}}, ToleranceConfig{}).kind, PsdClass::Indefinite);
}

TEST(PsdStatus, RandomGramMatricesMatchOracleRank) {
    Rng rng(22);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 8);
        const std::size_t r = 1 + static_cast<std::size_t>(trial) % n;
        const Matrix a = random_psd(rng, n, r);
        const auto st = psd_status(a, ToleranceConfig{});
        EXPECT_EQ(st.rank, r);
        EXPECT_EQ(st.kind, r == n ? PsdClass::PositiveDefinite : PsdClass::PositiveSemidefiniteSingular);
    }
}

// The curve layout with the printed letter values: the relation holds exactly, but the final pivot of J is
// t - 5197, so at t = 4798 the matrix is indefinite. Just above the threshold the ninth eigenvalue is below
// the rank tolerance (about 5e-5 at t = 5198), so the rank-9 checks use t = 6000.
TEST(PsdStatus, PrintedCurveDataIsIndefinite) {
    const auto f = load_fixture("ex2_5_base");
    EXPECT_EQ(psd_status(build_cubic_curve(*f.curve).entries, ToleranceConfig{}).kind, PsdClass::Indefinite);
    EXPECT_LT(oracle_eigenvalues(build_cubic_curve(*f.curve).entries)(0), -1.0);
    auto fixed = *f.curve;
    fixed['t'] = 6000;
    const auto st = psd_status(build_cubic_curve(fixed).entries, ToleranceConfig{});
    EXPECT_EQ(st.kind, PsdClass::PositiveSemidefiniteSingular);
    EXPECT_EQ(st.rank, 9u);
}

TEST(KernelBasis, CurveRelation) {
    auto c = load_fixture("ex2_5_base").curve.value();
    c['t'] = 6000;
    const auto k = kernel_basis(build_cubic_curve(c).entries, ToleranceConfig{});
    ASSERT_EQ(k.echelon.size(), 1u);
    // Columns x2 (index 2) and x1^3 (index 6) coincide.
    const Vector& v = k.echelon[0];
    EXPECT_NEAR(std::abs(v[2]), 1.0, 1e-8);
    EXPECT_NEAR(v[2] + v[6], 0.0, 1e-8);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (i != 2 && i != 6) EXPECT_NEAR(v[i], 0.0, 1e-8);
}

TEST(KernelBasis, RobinsonRelationsSpanCubicMinusLinear) {
    const auto m = robinson_m3();
    const auto k = kernel_basis(m.entries, ToleranceConfig{});
    ASSERT_EQ(k.orthonormal.size(), 2u);
    const Vector r1 = Polynomial(2, {{{3, 0}, 1}, {{1, 0}, -1}}).hat(3);
    const Vector r2 = Polynomial(2, {{{0, 3}, 1}, {{0, 1}, -1}}).hat(3);
    EXPECT_LE(distance_to_span(r1, k.orthonormal) / norm2(r1), 1e-8);
    EXPECT_LE(distance_to_span(r2, k.orthonormal) / norm2(r2), 1e-8);
    for (std::size_t i = 0; i < k.echelon.size(); ++i) EXPECT_DOUBLE_EQ(k.echelon[i][k.pivots[i]], 1.0);
}

TEST(KernelBasis, IdentityHasNone) {
    EXPECT_TRUE(kernel_basis(Matrix::identity(4), ToleranceConfig{}).orthonormal.empty());
}

TEST(KernelBasis, AnnihilatesRandomLowRank) {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = random_psd(rng, 7, 3);
        const auto k = kernel_basis(a, ToleranceConfig{});
        ASSERT_EQ(k.orthonormal.size(), 4u);
        for (const auto& v : k.orthonormal) EXPECT_LE(norm2(a * v), 1e-9 * (1 + a.frobenius_norm()));
        for (const auto& v : k.echelon) EXPECT_LE(norm2(a * v), 1e-8 * (1 + a.frobenius_norm()) * norm2(v));
    }
}

TEST(Echelonize, EarliestPivots) {
    std::vector<std::size_t> piv;
    const auto rows = echelonize({{0, 2, 4}, {1, 1, 1}}, &piv);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(piv, (std::vector<std::size_t>{0, 1}));
    EXPECT_DOUBLE_EQ(rows[0][1], 0.0);
    EXPECT_DOUBLE_EQ(rows[1][1], 1.0);
}

TEST(Frobenius, IdentityPair) { EXPECT_DOUBLE_EQ(frobenius(Matrix::identity(2), Matrix::identity(2)), 2.0); }

TEST(Frobenius, DiagonalPatternAgainstFirstMoments) {
    Rng rng(24);
    const auto mu = random_measure(rng, 3, 4);
    const auto y = moments_of_measure(mu, 3, 2);
    const double alpha = 0.3;
    const Matrix m1 = moment_matrix(y, 1).entries;
    const double expected =
        y.at({0, 0, 0}) - alpha * (y.at({2, 0, 0}) + y.at({0, 2, 0}) + y.at({0, 0, 2}));
    EXPECT_NEAR(frobenius(Matrix::diagonal({1, -alpha, -alpha, -alpha}), m1), expected, 1e-12 * (1 + std::abs(expected)));
}

TEST(Frobenius, PsdPairIsNonnegative) {
    Rng rng(25);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix a = random_psd(rng, 5, 1 + static_cast<std::size_t>(trial % 5));
        const Matrix b = random_psd(rng, 5, 1 + static_cast<std::size_t>((trial + 2) % 5));
        // tr(AB) = |L_B^T L_A|_F^2 with Cholesky-like factors from the oracle.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(to_eigen(a)), eb(to_eigen(b));
        const Eigen::MatrixXd la = ea.eigenvectors() * ea.eigenvalues().cwiseMax(0).cwiseSqrt().asDiagonal();
        const Eigen::MatrixXd lb = eb.eigenvectors() * eb.eigenvalues().cwiseMax(0).cwiseSqrt().asDiagonal();
        const double oracle = (lb.transpose() * la).squaredNorm();
        const double f = frobenius(a, b);
        EXPECT_GE(f, -1e-10);
        EXPECT_NEAR(f, oracle, 1e-9 * (1 + oracle));
    }
}

TEST(SchurBlocks, DiagonalSplit) {
    const Matrix a = Matrix::diagonal({1, 2, 3});
    const auto s = schur_blocks(a, 2);
    EXPECT_EQ(s.top_left(1, 1), 2);
    EXPECT_EQ(s.bottom_right(0, 0), 3);
    const auto inv = inverse_blocks(a, 2, ToleranceConfig{});
    EXPECT_NEAR(inv.bottom_right(0, 0), 1.0 / 3, 1e-15);
}

TEST(InverseBlocks, CurveJHasPositiveCorner) {
    const auto c = load_fixture("ex2_5_variant").curve.value();
    const auto m = build_cubic_curve(c).entries;
    const Matrix j = m.select({0, 1, 2, 3, 4, 5, 7, 8, 9});
    const auto b = psi_blocks(c, ToleranceConfig{});
    EXPECT_GT(b.epsilon, 0.0);
    EXPECT_EQ(j.rows(), 9u);
}

TEST(InverseBlocks, AgreesWithFullInverse) {
    Rng rng(26);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = random_psd(rng, 9, 9) + Matrix::identity(9);
        const auto b = inverse_blocks(a, 8, ToleranceConfig{});
        const Eigen::MatrixXd inv = to_eigen(a).inverse();
        const double scale = inv.cwiseAbs().maxCoeff();
        for (std::size_t i = 0; i < 8; ++i) {
            for (std::size_t k = 0; k < 8; ++k)
                EXPECT_NEAR(b.top_left(i, k), inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)), 1e-9 * scale);
            EXPECT_NEAR(b.top_right(i, 0), inv(static_cast<Eigen::Index>(i), 8), 1e-9 * scale);
        }
        EXPECT_NEAR(b.bottom_right(0, 0), inv(8, 8), 1e-9 * scale);
    }
}

TEST(InverseBlocks, SingularMatrixIsRejected) {
    EXPECT_THROW(inverse_blocks(Matrix{{1, 1}, {1, 1}}, 1, ToleranceConfig{}), NumericalError);
}

TEST(PencilFeasible, IdentityPairOnHalfLine) {
    const auto r = pencil_feasible(Matrix::identity(3), Matrix::identity(3), PencilDomain::NonNegative, ToleranceConfig{});
    EXPECT_TRUE(r.feasible);
    EXPECT_GE(r.t, 0.0);
    EXPECT_GE(min_eigenvalue(Matrix::identity(3) - Matrix::identity(3) * r.t), -1e-9);
}

TEST(PencilFeasible, SaddleAgainstNegativeSquareIsInfeasible) {
    const auto f = split_quadratic(Polynomial(2, {{{1, 1}, 1}}));
    const auto q = split_quadratic(Polynomial(2, {{{2, 0}, -1}}));
    const auto r = pencil_feasible(f.Q, q.Q, PencilDomain::Real, ToleranceConfig{});
    EXPECT_FALSE(r.feasible);
}

TEST(PencilFeasible, ShiftedSaddleIsFeasible) {
    const auto f = split_quadratic(Polynomial(2, {{{1, 1}, 1}, {{0, 0}, 1}, {{2, 0}, 1}, {{0, 2}, 1}}));
    const auto q = split_quadratic(Polynomial(2, {{{2, 0}, -1}}));
    const auto r = pencil_feasible(f.Q, q.Q, PencilDomain::Real, ToleranceConfig{});
    ASSERT_TRUE(r.feasible);
    EXPECT_GE(min_eigenvalue(f.Q - q.Q * r.t), -ToleranceConfig{}.psd_tol * 3 * std::max(1.0, f.Q.max_abs()));
    // t = 0 is admissible: the leading minors of F are 1, 3/4 and 1/2.
    EXPECT_GT(min_eigenvalue(f.Q), 0.0);
}

TEST(Cholesky, FactorsSpdAndRejectsIndefinite) {
    Rng rng(27);
    const Matrix a = random_psd(rng, 6, 6) + Matrix::identity(6);
    const auto l = cholesky(a);
    ASSERT_TRUE(l);
    EXPECT_LE(max_abs_diff(*l * l->transpose(), a), 1e-10 * a.max_abs());
    EXPECT_FALSE(cholesky(Matrix{{1, 2}, {2, 1}}));
}

TEST(Solve, MatchesOracle) {
    Rng rng(28);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix a(6, 6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) a(i, j) = gaussian(rng);
        const Vector b = random_vector(rng, 6);
        const Vector x = solve(a, b);
        EXPECT_LE(norm_inf(sub(a * x, b)), 1e-9 * (1 + norm_inf(b)) * (1 + a.max_abs() * norm_inf(x)));
        const Matrix inv = inverse(a);
        EXPECT_LE(max_abs_diff(a * inv, Matrix::identity(6)), 1e-8 * (1 + inv.max_abs()));
    }
}

TEST(PseudoInverse, SatisfiesPenroseIdentity) {
    Rng rng(29);
    const Matrix a = random_psd(rng, 6, 3);
    const Matrix p = pseudo_inverse_sym(a, ToleranceConfig{});
    EXPECT_LE(max_abs_diff(a * p * a, a), 1e-9 * a.max_abs());
    EXPECT_LE(max_abs_diff(p * a * p, p), 1e-9 * (1 + p.max_abs()));
}

TEST(SpectralNorm, MatchesOracle) {
    Rng rng(30);
    const Matrix a = random_symmetric(rng, 7);
    EXPECT_NEAR(spectral_norm_sym(a), oracle_eigenvalues(a).cwiseAbs().maxCoeff(), 1e-10);
}
