#pragma once

#include <optional>
#include <string>

#include "moments/core.hpp"
#include "moments/matrix.hpp"
#include "moments/symlin.hpp"
#include "moments/verdict.hpp"

namespace moments {

// q(x) = q0 + 2 q1^T x + x^T Q2 x = [1;x]^T Q [1;x].
struct QuadraticConstraint {
    int n = 0;
    double q0 = 0.0;
    Vector q1;
    Matrix Q2;
    Matrix Q;

    static QuadraticConstraint from_parts(double q0, Vector q1, Matrix Q2);
    double operator()(const Vector& x) const;
    Polynomial to_polynomial() const;
    QuadraticConstraint shifted(const Vector& a) const;  // x -> q(x + a)
    QuadraticConstraint negated() const;
};

QuadraticConstraint split_quadratic(const Polynomial& p);

// x0^2 q(x/x0), evaluated through the bordered matrix so x0 = 0 is allowed.
double homogenized_value(const QuadraticConstraint& q, double x0, const Vector& x);

enum class ConstraintMode { Equality, Inequality };
const char* to_string(ConstraintMode m);

AtomicMeasure solve_unconstrained(const MomentSequence& y, const ToleranceConfig& cfg);

struct NaiveResult {
    AtomicMeasure measure;
    bool single_atom = false;  // U = v1 v1^T: the (2r-2) construction degenerates to one atom
};
NaiveResult naive_unconstrained(const MomentSequence& y, const ToleranceConfig& cfg);

AtomicMeasure solve_degree1(const MomentSequence& y);

AtomicMeasure solve_compact_k(const MomentSequence& y, const QuadraticConstraint& q, ConstraintMode mode,
                              const ToleranceConfig& cfg);

Verdict decide_noncompact(const MomentSequence& y, const QuadraticConstraint& q, ConstraintMode mode,
                          const ToleranceConfig& cfg);

struct ApproxResult {
    MomentSequence perturbed;
    AtomicMeasure witness;
    double deviation = 0.0;     // |perturbed - y|_inf
    double constant = 0.0;      // deviation / eps^{1/4}
    std::size_t escaped = 0;    // degenerate terms replaced by escaping atoms
};

ApproxResult approx_sequence(const MomentSequence& y, const QuadraticConstraint& q, ConstraintMode mode, double eps,
                             const ToleranceConfig& cfg);

struct CertificateResult {
    PencilResult pencil;
    std::optional<Vector> violating_point;
    bool tolerance_issue = false;  // infeasible without a recovered negative point
};

CertificateResult s_lemma_cert(const QuadraticConstraint& f, const QuadraticConstraint& q, const ToleranceConfig& cfg);
CertificateResult eq_lemma_cert(const QuadraticConstraint& f, const QuadraticConstraint& q, const ToleranceConfig& cfg);

enum class CertMode { S, E };
CertificateResult eps_cert(const QuadraticConstraint& f, const QuadraticConstraint& q, CertMode mode, double eps,
                           const ToleranceConfig& cfg);

enum class WitnessTarget { Positive, Negative, Zero };
std::optional<Vector> witness_search(const QuadraticConstraint& q, WitnessTarget target);

// Tolerance for sign decisions on L_y(q).
double riesz_tolerance(const MomentSequence& y, const QuadraticConstraint& q, const ToleranceConfig& cfg);

}  // namespace moments
