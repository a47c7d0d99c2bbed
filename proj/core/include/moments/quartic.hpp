#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "moments/core.hpp"
#include "moments/matrix.hpp"
#include "moments/symlin.hpp"
#include "moments/verdict.hpp"

namespace moments {

inline constexpr std::uint64_t kDefaultSeed = 20240917;

// p(X) = 0 in the column space of M_d(y); pivot is the highest monomial of p, with coefficient 1.
struct ColumnRelation {
    Polynomial polynomial;
    MultiIndex pivot;
};

// Echelonized kernel of M, one relation per kernel dimension, ordered by pivot.
std::vector<ColumnRelation> column_relations(const MomentMatrix& m, const ToleranceConfig& cfg);

// |M p^| / (|M|_2 |p^|); 0 for the zero polynomial.
double relation_residual(const MomentMatrix& m, const Polynomial& p);
bool relation_holds(const MomentMatrix& m, const Polynomial& p, const ToleranceConfig& cfg);

struct RecursiveResult {
    bool pass = true;
    std::optional<Polynomial> p;  // relation that holds
    std::optional<Polynomial> q;  // multiplier with deg(pq) <= d whose product fails
    double residual = 0.0;
};

RecursiveResult recursive_check(const MomentMatrix& m, const ToleranceConfig& cfg);

// True when p(X) = 0 holds in M but (pq)(X) = 0 does not. Throws InvalidInput if deg(pq) > d.
bool violates_recursiveness(const MomentMatrix& m, const Polynomial& p, const Polynomial& q, const ToleranceConfig& cfg);

enum class VarietyKind { Empty, Finite, Infinite };
const char* to_string(VarietyKind k);

struct VarietyReport {
    VarietyKind kind = VarietyKind::Infinite;
    std::vector<Vector> points;  // when Finite

    std::size_t card() const { return points.size(); }
};

// Common real zeros of bivariate polynomials of degree <= 2.
VarietyReport conic_variety(const std::vector<Polynomial>& relations);
// V(M_2(y)) for a bivariate M_2.
VarietyReport variety_count(const MomentMatrix& m, const ToleranceConfig& cfg);

struct FlatExtension {
    MomentMatrix base;
    MomentMatrix extended;
    bool rank_preserved = false;
};

// Builds the flat-extension record and measures the rank of both matrices.
FlatExtension make_extension(const MomentMatrix& base, const MomentMatrix& extended, const ToleranceConfig& cfg);

struct FlatSearchOptions {
    std::uint64_t seed = kDefaultSeed;
    int starts = 16;
    std::map<MultiIndex, double> pinned;  // degree-5 moments held fixed
};

// Heuristic search for a flat M_3 over a bivariate M_2. Absent means the search failed, not that no measure exists.
std::optional<FlatExtension> flat_search(const MomentMatrix& m2, const ToleranceConfig& cfg,
                                         const FlatSearchOptions& opts = {});

// Atoms are joint eigenvalues of the multiplication operators of the extension. Throws NumericalError on failure.
AtomicMeasure extract_atoms(const FlatExtension& flat, const ToleranceConfig& cfg, std::uint64_t seed = kDefaultSeed);

Verdict decide_quartic(const MomentSequence& y, const ToleranceConfig& cfg, std::uint64_t seed = kDefaultSeed);
Verdict decide_univariate(const MomentSequence& y, const ToleranceConfig& cfg);
Verdict cubic_solve(const MomentSequence& y, const ToleranceConfig& cfg, std::uint64_t seed = kDefaultSeed);

// The 3x3 block of degree-3 moments against rows 1, x1, x2 and columns x1^2, x1x2, x2^2.
Matrix cubic_block(const MomentSequence& y);

struct QuarticApprox {
    MomentSequence perturbed;
    AtomicMeasure witness;
    double deviation = 0.0;
    bool escaped = false;  // escaping-atom construction (false: regularized flat search)
};

// A representable degree-4 sequence near y whose witness is exact. Absent when neither construction succeeds.
std::optional<QuarticApprox> quartic_approx(const MomentSequence& y, double eps, const ToleranceConfig& cfg,
                                            std::uint64_t seed = kDefaultSeed);

}  // namespace moments
