#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "moments/curve_psi.hpp"
#include "moments/errors.hpp"
#include "moments/fixtures.hpp"
#include "moments/symlin.hpp"
#include "support.hpp"

using namespace moments;
using namespace moments::testing;

namespace {

const ToleranceConfig kCfg;
const Rational kPsi = parse_rational("526337068574699/741609900");

CubicCurveMoments variant() { return load_fixture("ex2_5_variant").curve.value(); }

CubicCurveMoments with(CubicCurveMoments m, char letter, const Rational& v) {
    m[letter] = v;
    return m;
}

// Oracle: the defining expression (omega eps - <V,W>^2)/eps from a dense double inverse of J computed by Eigen.
double psi_oracle(const CubicCurveMoments& m) {
    const Matrix full = build_cubic_curve(m).entries;
    const Matrix j = full.select({0, 1, 2, 3, 4, 5, 7, 8, 9});
    // Scale rows and columns to unit diagonal before inverting.
    Eigen::MatrixXd e = to_eigen(j);
    Eigen::VectorXd d = e.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd inv = d.asDiagonal() * (d.asDiagonal() * e * d.asDiagonal()).inverse() * d.asDiagonal();
    Eigen::VectorXd w(8);
    const std::vector<char> wl{'h', 'x', 'u', 'j', 'k', 'r', 'v', 'w'};
    for (int i = 0; i < 8; ++i) w(i) = m.value(wl[static_cast<std::size_t>(i)]);
    const Eigen::MatrixXd p = inv.topLeftCorner(8, 8);
    const Eigen::VectorXd v = inv.topRightCorner(8, 1);
    const double eps = inv(8, 8);
    const double omega = w.dot(p * w);
    return (omega * eps - std::pow(v.dot(w), 2)) / eps;
}

}  // namespace

TEST(BuildCubicCurve, LayoutIsHankelWithRelation) {
    const auto m = build_cubic_curve(variant());
    ASSERT_EQ(m.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(m.entries(i, 2), m.entries(i, 6));
        for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(m.entries(i, j), m.entries(j, i));
    }
    const auto c = variant();
    EXPECT_EQ(m.entries(9, 9), c.value('t'));
    EXPECT_EQ(m.entries(8, 9), c.value('s'));
    EXPECT_EQ(m.entries(0, 9), c.value('x'));
    EXPECT_EQ(m.entries(7, 9), c.value('r'));
}

TEST(BuildCubicCurve, PointMassAtOrigin) {
    CubicCurveMoments m;
    const auto mm = build_cubic_curve(m);
    EXPECT_EQ(mm.entries(0, 0), 1.0);
    EXPECT_EQ(psd_status(mm.entries, kCfg).rank, 1u);
}

TEST(BuildCubicCurve, LoweringTIsIndefinite) {
    auto m = variant();
    m['t'] = 1000000;
    const auto ref = oracle_eigenvalues(build_cubic_curve(m).entries);
    EXPECT_LT(ref(0), 0.0);
    EXPECT_FALSE(check_hypotheses(m, kCfg, true).ok());
}

TEST(CheckHypotheses, VariantHoldsExactlyAndInFloat) {
    for (bool exact : {true, false}) {
        const auto h = check_hypotheses(variant(), kCfg, exact);
        EXPECT_TRUE(h.relation);
        EXPECT_TRUE(h.j_positive_definite);
        EXPECT_EQ(h.rank, 9u);
    }
}

TEST(CheckHypotheses, PrintedBaseDataFails) {
    const auto base = load_fixture("ex2_5_base").curve.value();
    const auto h = check_hypotheses(base, kCfg, true);
    EXPECT_TRUE(h.relation);
    EXPECT_FALSE(h.j_positive_definite);
    EXPECT_THROW(psi(base, kCfg), PreconditionError);
}

TEST(Psi, ExactFraction) {
    const auto start = std::chrono::steady_clock::now();
    EXPECT_EQ(psi_exact(variant()), kPsi);
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
}

TEST(Psi, FloatRoutesAgree) {
    const double ref = to_double(kPsi);
    EXPECT_LE(std::abs(psi(variant(), kCfg) - ref), 1e-9 * ref);
    const auto b = psi_blocks(variant(), kCfg);
    EXPECT_GT(b.epsilon, 0.0);
    EXPECT_LE(std::abs(b.psi - ref), 1e-6 * ref);
}

TEST(Psi, IndependentOfSAndT) {
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"526337068574699/741609900", "12000000000"}, {"709723", "12000000000"}, {"709800", "15000000000"},
        {"710000", "20000000000"},                    {"800000", "100000000000"}};
    for (const auto& [s, t] : pairs) {
        const auto m = with(with(variant(), 's', parse_rational(s)), 't', parse_rational(t));
        ASSERT_TRUE(check_hypotheses(m, kCfg, true).ok()) << s << " " << t;
        EXPECT_EQ(psi_exact(m), kPsi);
    }
}

TEST(Psi, MatchesDenseInverseOracle) {
    const auto m = with(variant(), 't', parse_rational("100000000000"));
    const double o = psi_oracle(m);
    EXPECT_LE(std::abs(psi(m, kCfg) - o), 1e-6 * std::abs(o));
    EXPECT_LE(std::abs(to_double(psi_exact(m)) - o), 1e-6 * std::abs(o));
}

TEST(CurveMeasureTest, SAroundPsi) {
    for (bool exact : {true, false}) {
        EXPECT_EQ(curve_measure_test(variant(), kCfg, exact).verdict, CurveVerdict::Boundary);
        EXPECT_EQ(curve_measure_test(with(variant(), 's', kPsi + 1), kCfg, exact).verdict, CurveVerdict::HasMeasure);
        EXPECT_EQ(curve_measure_test(with(variant(), 's', kPsi - 1), kCfg, exact).verdict, CurveVerdict::NoMeasure);
    }
}

TEST(CurveApprox, HasMeasureAlongM) {
    const auto items = curve_approx_sequence(variant(), {10, 100, 1000}, kCfg);
    ASSERT_EQ(items.size(), 3u);
    const std::vector<Rational> dev{Rational(1, 10), Rational(1, 100), Rational(1, 1000)};
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_TRUE(items[i].within_window);
        EXPECT_EQ(items[i].verdict, CurveVerdict::HasMeasure);
        EXPECT_EQ(items[i].deviation, dev[i]);
        EXPECT_EQ(items[i].moments['s'], kPsi + dev[i]);
    }
}

TEST(CurveApprox, FloorTLeavesTheWindow) {
    const auto f = load_fixture("ex2_5_variant");
    const auto floor = with(*f.curve, 't', parse_rational(f.metadata.at("t_floor")));
    ASSERT_TRUE(check_hypotheses(floor, kCfg, true).ok());
    const auto items = curve_approx_sequence(floor, {10, 1000000}, kCfg);
    EXPECT_FALSE(items[0].within_window);
    EXPECT_TRUE(items[1].within_window);
    EXPECT_EQ(items[1].verdict, CurveVerdict::HasMeasure);
}

TEST(CurveApprox, EmptyListAndPrecondition) {
    EXPECT_TRUE(curve_approx_sequence(variant(), {}, kCfg).empty());
    EXPECT_THROW(curve_approx_sequence(with(variant(), 's', kPsi + 1), {10}, kCfg), PreconditionError);
}

TEST(Rational, ParseAndLdl) {
    EXPECT_EQ(parse_rational("1.25"), Rational(5, 4));
    EXPECT_EQ(parse_rational("-3e2"), Rational(-300));
    EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
    EXPECT_THROW(parse_rational("1/0"), InvalidInput);
    EXPECT_THROW(parse_rational("abc"), InvalidInput);
    const RationalMatrix a{{4, 2}, {2, 3}};
    const auto piv = rational_ldl_pivots(a);
    ASSERT_EQ(piv.size(), 2u);
    EXPECT_EQ(piv[1], Rational(2));
    const auto inv = rational_inverse(a);
    EXPECT_EQ(inv[0][0], Rational(3, 8));
    EXPECT_EQ(inv[0][1], Rational(-1, 4));
}
