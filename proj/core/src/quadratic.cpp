#include "moments/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "moments/errors.hpp"
#include "moments/sturm_zhang.hpp"

namespace moments {

QuadraticConstraint QuadraticConstraint::from_parts(double q0, Vector q1, Matrix Q2) {
    const std::size_t n = q1.size();
    if (Q2.rows() != n || Q2.cols() != n) throw InvalidInput("quadratic parts have inconsistent sizes");
    QuadraticConstraint c;
    c.n = static_cast<int>(n);
    c.q0 = q0;
    c.q1 = std::move(q1);
    c.Q2 = Q2.symmetrized();
    c.Q = Matrix(n + 1, n + 1);
    c.Q(0, 0) = q0;
    for (std::size_t i = 0; i < n; ++i) {
        c.Q(0, i + 1) = c.Q(i + 1, 0) = c.q1[i];
        for (std::size_t j = 0; j < n; ++j) c.Q(i + 1, j + 1) = c.Q2(i, j);
    }
    return c;
}

double QuadraticConstraint::operator()(const Vector& x) const {
    if (x.size() != static_cast<std::size_t>(n)) throw InvalidInput("constraint: point dimension mismatch");
    return q0 + 2.0 * dot(q1, x) + dot(x, Q2 * x);
}

Polynomial QuadraticConstraint::to_polynomial() const {
    Polynomial p(n);
    p.set(MultiIndex::zero(n), q0);
    for (int i = 0; i < n; ++i) {
        p.add_term(MultiIndex::unit(n, i), 2.0 * q1[static_cast<std::size_t>(i)]);
        for (int j = i; j < n; ++j) {
            const double c = Q2(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            p.add_term(MultiIndex::unit(n, i) + MultiIndex::unit(n, j), i == j ? c : 2.0 * c);
        }
    }
    return p;
}

QuadraticConstraint QuadraticConstraint::shifted(const Vector& a) const {
    return from_parts((*this)(a), add(q1, Q2 * a), Q2);
}

QuadraticConstraint QuadraticConstraint::negated() const { return from_parts(-q0, scale(q1, -1.0), Q2 * -1.0); }

QuadraticConstraint split_quadratic(const Polynomial& p) {
    if (p.degree() > 2) throw InvalidInput("split_quadratic: degree exceeds 2");
    const int n = p.n();
    Vector q1(static_cast<std::size_t>(n), 0.0);
    Matrix q2(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    double q0 = 0.0;
    for (const auto& [a, c] : p.terms()) {
        const auto& e = a.exponents();
        if (a.degree() == 0) {
            q0 = c;
        } else if (a.degree() == 1) {
            const auto i = static_cast<std::size_t>(std::find(e.begin(), e.end(), 1) - e.begin());
            q1[i] = c / 2.0;
        } else {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < e.size(); ++i)
                for (int r = 0; r < e[i]; ++r) idx.push_back(i);
            if (idx[0] == idx[1]) {
                q2(idx[0], idx[0]) = c;
            } else {
                q2(idx[0], idx[1]) = c / 2.0;
                q2(idx[1], idx[0]) = c / 2.0;
            }
        }
    }
    return QuadraticConstraint::from_parts(q0, std::move(q1), std::move(q2));
}

double homogenized_value(const QuadraticConstraint& q, double x0, const Vector& x) {
    Vector z(x.size() + 1);
    z[0] = x0;
    std::copy(x.begin(), x.end(), z.begin() + 1);
    return dot(z, q.Q * z);
}

const char* to_string(ConstraintMode m) { return m == ConstraintMode::Equality ? "equality" : "inequality"; }

const char* to_string(Status s) {
    switch (s) {
        case Status::MeasureConstructed: return "MeasureConstructed";
        case Status::ExistsNonConstructive: return "ExistsNonConstructive";
        case Status::ApproximableOnly: return "ApproximableOnly";
        case Status::NoMeasure: return "NoMeasure";
    }
    return "?";
}

double riesz_tolerance(const MomentSequence& y, const QuadraticConstraint& q, const ToleranceConfig& cfg) {
    double s = 0.0;
    for (double v : q.Q.data()) s += std::abs(v);
    return cfg.moment_threshold(y) * (1.0 + s);
}

namespace {

constexpr double kDegenerateTau = 1e-6;

Matrix first_moment_matrix(const MomentSequence& y) {
    if (y.k() < 2) throw InvalidInput("need moments up to degree 2");
    return moment_matrix(y, 1).entries;
}

double support_tolerance(const QuadraticConstraint& q, const Vector& v) {
    return 1e-7 * (1.0 + q.Q.max_abs()) * (1.0 + dot(v, v));
}

bool on_support(const QuadraticConstraint& q, const Vector& v, ConstraintMode mode) {
    const double val = q(v);
    const double tol = support_tolerance(q, v);
    return mode == ConstraintMode::Equality ? std::abs(val) <= tol : val >= -tol;
}

struct SplitTerms {
    AtomicMeasure measure;
    std::vector<Vector> degenerate;  // directions w of terms (0, w)
};

SplitTerms split_terms(const RankOneDecomposition& dec) {
    SplitTerms s;
    for (const auto& u : dec.vectors) {
        const double tau = u[0];
        Vector w(u.begin() + 1, u.end());
        if (std::abs(tau) <= kDegenerateTau * norm2(u))
            s.degenerate.push_back(std::move(w));
        else
            s.measure.add(scale(w, 1.0 / tau), tau * tau);
    }
    return s;
}

void require_positive_mass(const MomentSequence& y) {
    if (!(y.values()[0] > 0.0)) throw InvalidInput("y0 must be positive");
}

bool negative_definite(const Matrix& q2) {
    if (q2.rows() == 0) return false;
    const auto e = sym_eigen(q2);
    return e.values.front() < -1e-12 * std::max(1.0, std::abs(e.values.back()));
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

AtomicMeasure solve_degree1(const MomentSequence& y) {
    if (!(y.values()[0] > 0.0)) throw NoMeasureError("y0 must be positive for a degree-1 measure");
    const int n = y.n();
    Vector atom(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) atom[static_cast<std::size_t>(i)] = y[MultiIndex::unit(n, i)] / y.values()[0];
    AtomicMeasure mu;
    mu.add(std::move(atom), y.values()[0]);
    return mu;
}

AtomicMeasure solve_unconstrained(const MomentSequence& y, const ToleranceConfig& cfg) {
    require_positive_mass(y);
    const Matrix m1 = first_moment_matrix(y);
    const PsdStatus st = psd_status(m1, cfg);
    if (st.kind == PsdClass::Indefinite) throw NoMeasureError("M1(y) is not positive semidefinite");
    const int n = y.n();
    const double y0 = y.values()[0];

    double trace = 0.0;
    for (int i = 0; i < n; ++i) trace += y[MultiIndex::unit(n, i) + MultiIndex::unit(n, i)];
    AtomicMeasure mu;
    if (trace <= st.rank_threshold) {
        mu.add(Vector(static_cast<std::size_t>(n), 0.0), y0);
        return mu;
    }
    const double alpha = y0 / trace;
    Vector diag(static_cast<std::size_t>(n) + 1, -alpha);
    diag[0] = 1.0;
    const RankOneDecomposition dec = sz_decompose(m1, Matrix::diagonal(diag), cfg);
    for (const auto& u : dec.vectors) {
        const double tau = u[0];
        if (std::abs(tau) <= 1e-14 * norm2(u)) throw NumericalError("solve_unconstrained: vanishing tau");
        mu.add(scale(Vector(u.begin() + 1, u.end()), 1.0 / tau), tau * tau);
    }
    mu = merge_atoms(mu, cfg);
    if (!verify_measure(y.truncated(2), mu, cfg).pass)
        throw NumericalError("solve_unconstrained: constructed measure fails moment verification");
    return mu;
}

NaiveResult naive_unconstrained(const MomentSequence& y, const ToleranceConfig& cfg) {
    require_positive_mass(y);
    const Matrix m1 = first_moment_matrix(y);
    if (psd_status(m1, cfg).kind == PsdClass::Indefinite) throw NoMeasureError("M1(y) is not positive semidefinite");
    const std::size_t n = static_cast<std::size_t>(y.n());
    const double y0 = m1(0, 0);

    Vector v1(n);
    Matrix u(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        v1[i] = m1(0, i + 1) / y0;
        for (std::size_t j = 0; j < n; ++j) u(i, j) = m1(i + 1, j + 1) / y0;
    }
    const Matrix rest = u - Matrix::outer(v1, v1);
    const auto e = sym_eigen(rest);
    const double thr = cfg.rank_threshold(n, std::max(std::abs(e.values.front()), std::abs(e.values.back())));
    std::vector<Vector> vs;
    for (std::size_t i = 0; i < n; ++i)
        if (e.values[i] > thr) vs.push_back(scale(e.vectors.col(i), std::sqrt(e.values[i])));

    NaiveResult res;
    if (vs.empty()) {
        res.single_atom = true;
        res.measure.add(v1, y0);
        return res;
    }
    const double rm1 = static_cast<double>(vs.size());
    const double w = y0 / (2.0 * rm1);
    for (const auto& v : vs) {
        res.measure.add(add(v1, scale(v, std::sqrt(rm1))), w);
        res.measure.add(sub(v1, scale(v, std::sqrt(rm1))), w);
    }
    res.measure = merge_atoms(res.measure, cfg);
    if (!verify_measure(y.truncated(2), res.measure, cfg).pass)
        throw NumericalError("naive_unconstrained: constructed measure fails moment verification");
    return res;
}

AtomicMeasure solve_compact_k(const MomentSequence& y, const QuadraticConstraint& q, ConstraintMode mode,
                              const ToleranceConfig& cfg) {
    require_positive_mass(y);
    if (q.n != y.n()) throw InvalidInput("constraint dimension mismatch");
    if (!negative_definite(q.Q2))
        throw PreconditionError("quadratic part of q is not negative definite; use decide_noncompact");
    const Matrix m1 = first_moment_matrix(y);
    if (psd_status(m1, cfg).kind == PsdClass::Indefinite) throw NoMeasureError("M1(y) is not positive semidefinite");
    const double l = frobenius(q.Q, m1);
    const double tol = riesz_tolerance(y, q, cfg);
    if (mode == ConstraintMode::Equality && std::abs(l) > tol) throw NoMeasureError("L_y(q) = " + fmt(l) + " is not 0");
    if (mode == ConstraintMode::Inequality && l < -tol) throw NoMeasureError("L_y(q) = " + fmt(l) + " is negative");

    const RankOneDecomposition dec = sz_decompose(m1, q.Q, cfg);
    SplitTerms terms = split_terms(dec);
    if (!terms.degenerate.empty()) throw NumericalError("solve_compact_k: degenerate term despite Q2 < 0");
    AtomicMeasure mu = merge_atoms(terms.measure, cfg);
    if (!verify_measure(y.truncated(2), mu, cfg).pass)
        throw NumericalError("solve_compact_k: constructed measure fails moment verification");
    for (const auto& v : mu.atoms)
        if (!on_support(q, v, mode)) throw NumericalError("solve_compact_k: atom violates the constraint");
    return mu;
}

Verdict decide_noncompact(const MomentSequence& y, const QuadraticConstraint& q, ConstraintMode mode,
                          const ToleranceConfig& cfg) {
    require_positive_mass(y);
    if (q.n != y.n()) throw InvalidInput("constraint dimension mismatch");
    const bool nonempty = mode == ConstraintMode::Equality
                              ? witness_search(q, WitnessTarget::Zero).has_value()
                              : (witness_search(q, WitnessTarget::Positive) || witness_search(q, WitnessTarget::Zero));
    if (!nonempty) throw InvalidInput(mode == ConstraintMode::Equality ? "E(q) is empty" : "S(q) is empty");

    Verdict v;
    const Matrix m1 = first_moment_matrix(y);
    const PsdStatus st = psd_status(m1, cfg);
    const double l = frobenius(q.Q, m1);
    const double tol = riesz_tolerance(y, q, cfg);
    v.diagnostics["rank_M1"] = std::to_string(st.rank);
    v.diagnostics["psd"] = to_string(st.kind);
    v.diagnostics["L_y(q)"] = fmt(l);

    if (st.kind == PsdClass::Indefinite) {
        v.status = Status::NoMeasure;
        v.because("M1(y) is not positive semidefinite");
        return v;
    }
    if (mode == ConstraintMode::Equality && std::abs(l) > tol) {
        v.status = Status::NoMeasure;
        v.because("L_y(q) = " + fmt(l) + " differs from 0, so no measure on E(q)");
        return v;
    }
    if (mode == ConstraintMode::Inequality && l < -tol) {
        v.status = Status::NoMeasure;
        v.because("L_y(q) = " + fmt(l) + " is negative, so no measure on S(q)");
        return v;
    }
    v.approximable = true;
    v.because("M1(y) is PSD and L_y(q) has the required sign: y lies in the closure of representable sequences");

    if (negative_definite(q.Q2)) {
        try {
            v.measure = solve_compact_k(y, q, mode, cfg);
            v.status = Status::MeasureConstructed;
            v.because("Q2 is negative definite: compact case, rank-one decomposition gives the atoms");
        } catch (const NumericalError& e) {
            v.status = Status::ExistsNonConstructive;
            v.because(std::string("compact case guarantees a measure; construction failed numerically: ") + e.what());
        }
        return v;
    }

    const RankOneDecomposition dec = sz_decompose(m1, q.Q, cfg);
    SplitTerms terms = split_terms(dec);
    if (terms.degenerate.empty()) {
        AtomicMeasure mu = merge_atoms(terms.measure, cfg);
        bool ok = verify_measure(y.truncated(2), mu, cfg).pass;
        for (const auto& a : mu.atoms) ok = ok && on_support(q, a, mode);
        if (ok) {
            v.status = Status::MeasureConstructed;
            v.measure = std::move(mu);
            v.because("rank-one decomposition with equal q-values has every tau_i away from 0");
            return v;
        }
    }
    v.diagnostics["degenerate_terms"] = std::to_string(terms.degenerate.size());
    if (st.kind == PsdClass::PositiveDefinite) {
        v.status = Status::ExistsNonConstructive;
        v.because("M1(y) is positive definite with L_y(q) of the required sign: interior point, a measure exists");
        v.because("decomposition has a degenerate term; use approx_sequence for explicit approximants");
    } else {
        v.status = Status::ApproximableOnly;
        v.because("M1(y) is singular and the decomposition has a degenerate term: only approximate measures are certified");
    }
    return v;
}

namespace {

// Point s*w + gamma*d on E(q) (or in S(q)) with |gamma| as small as possible; w is a unit vector.
// The deviation this causes is measured by the caller, so gamma is not capped relative to s.
std::optional<Vector> escape_point(const QuadraticConstraint& q, const Vector& w, double s, ConstraintMode mode) {
    const std::size_t n = w.size();
    std::vector<Vector> dirs;
    const auto e = sym_eigen(q.Q2);
    for (std::size_t i = 0; i < n; ++i) dirs.push_back(e.vectors.col(i));
    for (std::size_t i = 0; i < n; ++i) {
        Vector ax(n, 0.0);
        ax[i] = 1.0;
        dirs.push_back(std::move(ax));
    }
    if (norm2(q.q1) > 0) dirs.push_back(scale(q.q1, 1.0 / norm2(q.q1)));

    std::optional<Vector> best;
    double best_gamma = std::numeric_limits<double>::infinity();
    double best_g = 0.0;
    for (double sign : {1.0, -1.0}) {
        const Vector base = scale(w, sign * s);
        const double c = q(base);
        if (mode == ConstraintMode::Inequality && c >= 0.0) return base;
        if (c == 0.0) return base;
        const Vector grad = add(q.q1, q.Q2 * base);
        for (const auto& d : dirs) {
            const double a = dot(d, q.Q2 * d);
            const double b = dot(d, grad);
            // a g^2 + 2 b g + c = 0
            std::vector<double> roots;
            if (std::abs(a) <= 1e-14 * (1.0 + std::abs(b))) {
                if (b != 0.0) roots.push_back(-c / (2.0 * b));
            } else {
                const double disc = b * b - a * c;
                if (disc < 0) continue;
                const double qq = -(b + (b >= 0 ? 1.0 : -1.0) * std::sqrt(disc));
                if (qq != 0.0) roots.push_back(c / qq);
                roots.push_back(qq / a);
            }
            for (double g : roots) {
                const double mag = std::abs(g);
                // Ties prefer gamma >= 0.
                const bool tie = best && std::abs(mag - best_gamma) <= 1e-12 * std::max(best_gamma, 1e-300);
                const bool better = !best || (!tie && mag < best_gamma) || (tie && g >= 0.0 && best_g < 0.0);
                if (better) {
                    best_gamma = mag;
                    best_g = g;
                    best = add(base, scale(d, g));
                }
            }
        }
    }
    return best;
}

}  // namespace

ApproxResult approx_sequence(const MomentSequence& y, const QuadraticConstraint& q, ConstraintMode mode, double eps,
                             const ToleranceConfig& cfg) {
    if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
    const Verdict v = decide_noncompact(y, q, mode, cfg);
    if (!v.approximable) throw NoMeasureError("conditions for approximation fail: " + v.certificate.back());
    const MomentSequence y2 = y.truncated(2);

    ApproxResult r;
    if (v.status == Status::MeasureConstructed) {
        r.witness = *v.measure;
        r.perturbed = y2;
        return r;
    }
    const Matrix m1 = first_moment_matrix(y);
    const RankOneDecomposition dec = sz_decompose(m1, q.Q, cfg);
    const SplitTerms terms = split_terms(dec);
    double mass = 0.0;
    for (double w : terms.measure.weights) mass += w;
    const double k = static_cast<double>(terms.degenerate.size());
    if (!(k * eps < mass)) throw PreconditionError("eps too large for the available mass");

    const double keep = 1.0 - k * eps / mass;
    for (std::size_t i = 0; i < terms.measure.size(); ++i) r.witness.add(terms.measure.atoms[i], terms.measure.weights[i] * keep);
    for (const auto& w : terms.degenerate) {
        // eps * s^2 * w'w'^T reproduces the degenerate term w w^T.
        const double s = norm2(w) / std::sqrt(eps);
        auto p = escape_point(q, scale(w, 1.0 / norm2(w)), s, mode);
        if (!p) throw NumericalError("approx_sequence: no escaping point along a degenerate direction");
        r.witness.add(std::move(*p), eps);
        ++r.escaped;
    }
    for (const auto& a : r.witness.atoms)
        if (!on_support(q, a, mode)) throw NumericalError("approx_sequence: witness atom violates the constraint");
    r.perturbed = moments_of_measure(r.witness, y.n(), 2);
    r.deviation = norm_inf(sub(r.perturbed.values(), y2.values()));
    r.constant = r.deviation / std::pow(eps, 0.25);
    return r;
}

std::optional<Vector> witness_search(const QuadraticConstraint& q, WitnessTarget target) {
    const std::size_t n = static_cast<std::size_t>(q.n);
    if (target == WitnessTarget::Negative) return witness_search(q.negated(), WitnessTarget::Positive);
    const double scale_q = std::max(1.0, q.Q.max_abs());
    const double tiny = 1e-12 * scale_q;

    if (target == WitnessTarget::Positive) {
        if (q.q0 > 0) return Vector(n, 0.0);
        const auto e = sym_eigen(q.Q2);
        // Along the top eigenvector the quadratic grows when its eigenvalue is positive.
        if (e.values.front() > tiny) {
            const Vector v = e.vectors.col(0);
            const double b = dot(q.q1, v);
            const double sign = b >= 0 ? 1.0 : -1.0;
            double alpha = (2.0 * std::abs(b) + std::sqrt(std::abs(q.q0) * e.values.front()) + 1.0) / e.values.front();
            for (int i = 0; i < 200; ++i, alpha *= 2.0) {
                const Vector x = scale(v, sign * alpha);
                if (q(x) > 0) return x;
            }
        }
        // Flat directions with a linear slope.
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(e.values[i]) > tiny) continue;
            const Vector v = e.vectors.col(i);
            const double b = dot(q.q1, v);
            if (std::abs(b) <= tiny) continue;
            double alpha = (std::abs(q.q0) + 1.0) / std::abs(b);
            for (int it = 0; it < 200; ++it, alpha *= 2.0) {
                const Vector x = scale(v, b > 0 ? alpha : -alpha);
                if (q(x) > 0) return x;
            }
        }
        // Otherwise q is concave with a maximizer.
        ToleranceConfig cfg;
        const Vector xs = scale(pseudo_inverse_sym(q.Q2, cfg) * q.q1, -1.0);
        if (q(xs) > 0) return xs;
        return std::nullopt;
    }

    // Zero.
    const auto pos = witness_search(q, WitnessTarget::Positive);
    const auto neg = witness_search(q, WitnessTarget::Negative);
    if (pos && neg) {
        Vector lo = *neg, hi = *pos;
        if (q(lo) == 0.0) return lo;
        for (int it = 0; it < 200; ++it) {
            const Vector mid = scale(add(lo, hi), 0.5);
            const double val = q(mid);
            if (val == 0.0) return mid;
            if (val < 0)
                lo = mid;
            else
                hi = mid;
        }
        return std::abs(q(lo)) < std::abs(q(hi)) ? lo : hi;
    }
    if (!pos && !neg) {
        if (q.Q.max_abs() == 0.0) return Vector(n, 0.0);
        return std::nullopt;
    }
    // Semidefinite: the only candidates are stationary points.
    ToleranceConfig cfg;
    const Vector xs = scale(pseudo_inverse_sym(q.Q2, cfg) * q.q1, -1.0);
    if (std::abs(q(xs)) <= 1e-10 * scale_q * (1.0 + dot(xs, xs))) return xs;
    if (q.q0 == 0.0) return Vector(n, 0.0);
    return std::nullopt;
}

namespace {

std::optional<Vector> recover_violation(const QuadraticConstraint& f, const QuadraticConstraint& q, double t,
                                        bool equality, const std::vector<Vector>& extra) {
    const auto e = sym_eigen(f.Q - q.Q * t);
    std::vector<Vector> candidates;
    const Vector u = e.vectors.col(e.values.size() - 1);
    if (std::abs(u[0]) > 1e-12) candidates.push_back(scale(Vector(u.begin() + 1, u.end()), 1.0 / u[0]));
    for (const auto& x : extra) candidates.push_back(x);
    candidates.push_back(Vector(static_cast<std::size_t>(f.n), 0.0));
    for (const auto& x : candidates) {
        const double qv = q(x);
        const double tol = 1e-9 * (1.0 + q.Q.max_abs()) * (1.0 + dot(x, x));
        const bool in_set = equality ? std::abs(qv) <= tol : qv >= -tol;
        if (in_set && f(x) < -tol) return x;
    }
    return std::nullopt;
}

void check_dims(const QuadraticConstraint& f, const QuadraticConstraint& q) {
    if (f.n != q.n) throw InvalidInput("f and q have different dimensions");
}

}  // namespace

CertificateResult s_lemma_cert(const QuadraticConstraint& f, const QuadraticConstraint& q, const ToleranceConfig& cfg) {
    check_dims(f, q);
    const auto xi = witness_search(q, WitnessTarget::Positive);
    if (!xi) throw PreconditionError("no Slater point with q > 0; use eps_cert");
    CertificateResult r;
    r.pencil = pencil_feasible(f.Q, q.Q, PencilDomain::NonNegative, cfg);
    if (!r.pencil.feasible) {
        r.violating_point = recover_violation(f, q, r.pencil.t, false, {*xi});
        r.tolerance_issue = !r.violating_point;
    }
    return r;
}

CertificateResult eq_lemma_cert(const QuadraticConstraint& f, const QuadraticConstraint& q, const ToleranceConfig& cfg) {
    check_dims(f, q);
    const auto xi = witness_search(q, WitnessTarget::Positive);
    const auto zeta = witness_search(q, WitnessTarget::Negative);
    if (!xi) throw PreconditionError("missing witness: no point with q > 0");
    if (!zeta) throw PreconditionError("missing witness: no point with q < 0");
    const auto a = witness_search(q, WitnessTarget::Zero);
    if (!a) throw PreconditionError("E(q) is empty");
    // Shift a zero of q to the origin, then the bordered matrices are the homogenized forms.
    QuadraticConstraint fa = f.shifted(*a);
    QuadraticConstraint qa = q.shifted(*a);
    qa = QuadraticConstraint::from_parts(0.0, qa.q1, qa.Q2);
    CertificateResult r;
    r.pencil = pencil_feasible(fa.Q, qa.Q, PencilDomain::Real, cfg);
    if (!r.pencil.feasible) {
        auto p = recover_violation(fa, qa, r.pencil.t, true, {});
        if (p) r.violating_point = add(*p, *a);
        r.tolerance_issue = !r.violating_point;
    }
    return r;
}

CertificateResult eps_cert(const QuadraticConstraint& f, const QuadraticConstraint& q, CertMode mode, double eps,
                           const ToleranceConfig& cfg) {
    check_dims(f, q);
    if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
    std::optional<Vector> member = witness_search(q, WitnessTarget::Zero);
    if (mode == CertMode::S && !member) member = witness_search(q, WitnessTarget::Positive);
    if (!member) throw PreconditionError(mode == CertMode::E ? "E(q) is empty" : "S(q) is empty");
    const Matrix fe = f.Q + Matrix::identity(f.Q.rows()) * eps;
    CertificateResult r;
    r.pencil = pencil_feasible(fe, q.Q, mode == CertMode::S ? PencilDomain::NonNegative : PencilDomain::Real, cfg);
    if (!r.pencil.feasible) {
        r.violating_point = recover_violation(f, q, r.pencil.t, mode == CertMode::E, {*member});
        r.tolerance_issue = !r.violating_point;
    }
    return r;
}

}  // namespace moments
