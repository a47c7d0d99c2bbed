#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "moments/core.hpp"
#include "moments/rational.hpp"

namespace moments {

// Moment data of a bivariate M_3 with the column relation X2 = X1^3, normalized with y00 = 1.
// Seventeen letters fill the 10x10 layout; s is y15 and t is y06.
struct CubicCurveMoments {
    static constexpr std::string_view kLetters = "abcdefghjkrstuvwx";

    std::array<Rational, 17> values{};

    Rational& operator[](char letter);
    const Rational& operator[](char letter) const;
    double value(char letter) const { return to_double((*this)[letter]); }
};

// The 10x10 layout over labels 1, x1, x2, x1^2, x1x2, x2^2, x1^3, x1^2x2, x1x2^2, x2^3.
MomentMatrix build_cubic_curve(const CubicCurveMoments& m);
RationalMatrix build_cubic_curve_exact(const CubicCurveMoments& m);

// J is M with row and column x1^3 removed; every hypothesis (PSD, rank 9, X2 = X1^3) reduces to J > 0
// because the removed column duplicates column x2.
struct CurveHypotheses {
    bool relation = false;        // column x1^3 equals column x2 exactly
    bool j_positive_definite = false;
    std::size_t rank = 0;         // rank of M implied by the LDL pivots of J
    bool ok() const { return relation && j_positive_definite; }
};

CurveHypotheses check_hypotheses(const CubicCurveMoments& m, const ToleranceConfig& cfg, bool exact);

// psi = W^T N^-1 W via Cholesky of the leading 8x8 block N of J. Throws PreconditionError unless J > 0.
double psi(const CubicCurveMoments& m, const ToleranceConfig& cfg);

// The defining expression (omega eps - <V,W>^2) / eps from the blocks of J^-1.
struct PsiBlocks {
    double omega = 0.0;
    double vw = 0.0;
    double epsilon = 0.0;
    double psi = 0.0;
};
PsiBlocks psi_blocks(const CubicCurveMoments& m, const ToleranceConfig& cfg);

// Same expression over the rationals with a full 9x9 inverse.
Rational psi_exact(const CubicCurveMoments& m);

enum class CurveVerdict { HasMeasure, NoMeasure, Boundary };
const char* to_string(CurveVerdict v);

struct CurveTest {
    CurveVerdict verdict = CurveVerdict::Boundary;
    double psi = 0.0;
    double s = 0.0;
    std::optional<Rational> psi_exact;  // set in exact mode
};

// HasMeasure iff s > psi beyond the band; the band is 1e-8 (1 + |psi|) in float mode and zero in exact mode.
CurveTest curve_measure_test(const CubicCurveMoments& m, const ToleranceConfig& cfg, bool exact);

struct CurveApproxItem {
    long m = 0;
    CubicCurveMoments moments;  // s replaced by s + 1/m
    Rational deviation;         // |y^(m) - y| = 1/m
    bool within_window = false; // J stays positive definite, so the test applies
    CurveVerdict verdict = CurveVerdict::Boundary;
};

// Replaces s by s + 1/m for each m; instances leaving the positive-definite window are flagged, not dropped.
std::vector<CurveApproxItem> curve_approx_sequence(const CubicCurveMoments& m, const std::vector<long>& mlist,
                                                   const ToleranceConfig& cfg);

}  // namespace moments
