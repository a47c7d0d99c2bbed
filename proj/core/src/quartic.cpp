#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "moments/errors.hpp"
#include "moments/quartic.hpp"

namespace moments {

using detail::fmt;

namespace {

std::optional<AtomicMeasure> construct_from_flat(const FlatExtension& flat, const MomentSequence& y,
                                                 const ToleranceConfig& cfg, std::uint64_t seed) {
    try {
        AtomicMeasure mu = extract_atoms(flat, cfg, seed);
        if (verify_measure(y, mu, cfg).pass) return mu;
    } catch (const MomentError&) {
    }
    return std::nullopt;
}

FlatSearchOptions seeded(std::uint64_t seed) {
    FlatSearchOptions o;
    o.seed = seed;
    return o;
}

std::string card_string(const VarietyReport& v) {
    return v.kind == VarietyKind::Infinite ? "infinite" : std::to_string(v.card());
}

}  // namespace

Verdict decide_quartic(const MomentSequence& y, const ToleranceConfig& cfg, std::uint64_t seed) {
    if (y.n() != 2 || y.k() < 4) throw InvalidInput("decide_quartic: requires bivariate moments of degree 4");
    const MomentSequence y4 = y.truncated(4);
    if (!(y4.values()[0] > 0.0)) throw InvalidInput("y00 must be positive");
    const MomentMatrix m = moment_matrix(y4, 2);
    const PsdStatus st = psd_status(m.entries, cfg);

    Verdict v;
    v.diagnostics["rank"] = std::to_string(st.rank);
    v.diagnostics["psd"] = to_string(st.kind);
    if (st.kind == PsdClass::Indefinite) {
        v.status = Status::NoMeasure;
        v.because("M2(y) is not positive semidefinite (min eigenvalue " + fmt(st.min_eig) + ")");
        return v;
    }
    v.approximable = true;

    if (st.kind == PsdClass::PositiveDefinite) {
        v.status = Status::ExistsNonConstructive;
        v.because("M2(y) is positive definite, so y has a representing measure");
        if (auto flat = flat_search(m, cfg, seeded(seed))) {
            if (auto mu = construct_from_flat(*flat, y4, cfg, seed)) {
                v.status = Status::MeasureConstructed;
                v.measure = std::move(mu);
                v.diagnostics["flat_search"] = "success";
                v.because("flat extension M3 found; atoms are the joint eigenvalues of its multiplication operators");
                return v;
            }
        }
        v.diagnostics["flat_search"] = "heuristic failed";
        return v;
    }

    const RecursiveResult rc = recursive_check(m, cfg);
    const VarietyReport var = variety_count(m, cfg);
    v.diagnostics["recursive"] = rc.pass ? "pass" : "fail";
    v.diagnostics["variety"] = to_string(var.kind);
    v.diagnostics["variety_card"] = card_string(var);
    if (!rc.pass) {
        v.status = Status::NoMeasure;
        v.because("not recursively generated: " + rc.p->to_string() + " = 0 in the columns but (" +
                  rc.p->to_string() + ")*(" + rc.q->to_string() + ") is not");
        v.because("M2(y) is positive semidefinite, so y lies in the closure of representable sequences");
        return v;
    }
    if (var.kind != VarietyKind::Infinite && var.card() < st.rank) {
        v.status = Status::NoMeasure;
        v.because("rank " + std::to_string(st.rank) + " > card V = " + std::to_string(var.card()) +
                  ": no measure can be supported in V(M2(y))");
        v.because("M2(y) is positive semidefinite, so y lies in the closure of representable sequences");
        return v;
    }
    v.status = Status::ExistsNonConstructive;
    v.because("positive, recursively generated and rank " + std::to_string(st.rank) + " <= card V = " +
              card_string(var) + ": a representing measure exists");
    if (var.kind == VarietyKind::Finite) {
        if (auto mu = detail::fit_weights(y4, var.points, cfg)) {
            v.status = Status::MeasureConstructed;
            v.measure = std::move(mu);
            v.because("weights fitted on the points of V(M2(y))");
            return v;
        }
    }
    if (auto flat = flat_search(m, cfg, seeded(seed))) {
        if (auto mu = construct_from_flat(*flat, y4, cfg, seed)) {
            v.status = Status::MeasureConstructed;
            v.measure = std::move(mu);
            v.diagnostics["flat_search"] = "success";
            v.because("flat extension M3 found for the singular M2(y)");
            return v;
        }
    }
    v.diagnostics["flat_search"] = "heuristic failed";
    return v;
}

Verdict decide_univariate(const MomentSequence& y, const ToleranceConfig& cfg) {
    if (y.n() != 1 || y.k() < 2 || y.k() % 2 != 0) throw InvalidInput("decide_univariate: requires n = 1, even degree");
    if (!(y.values()[0] > 0.0)) throw InvalidInput("y0 must be positive");
    const int d = y.k() / 2;
    const MomentMatrix m = moment_matrix(y, d);
    const PsdStatus st = psd_status(m.entries, cfg);
    Verdict v;
    v.diagnostics["rank"] = std::to_string(st.rank);
    v.diagnostics["psd"] = to_string(st.kind);
    if (st.kind == PsdClass::Indefinite) {
        v.status = Status::NoMeasure;
        v.because("Hankel matrix M" + std::to_string(d) + " is not positive semidefinite");
        return v;
    }

    MomentSequence ext(1, 2 * d + 2);
    for (int i = 0; i <= 2 * d; ++i) ext[MultiIndex({i})] = y[MultiIndex({i})];
    if (st.kind == PsdClass::PositiveDefinite) {
        // y_{2d+2} at the Schur floor b^T M^-1 b makes M_{d+1} flat for any y_{2d+1}; choosing y_{2d+1} to
        // minimize that floor keeps the extension on the scale of M_d, where the rank comparison is reliable.
        const std::size_t last = static_cast<std::size_t>(d);
        Vector b(last + 1), e_last(last + 1, 0.0);
        for (std::size_t i = 0; i < last; ++i) b[i] = ext[MultiIndex({d + 1 + static_cast<int>(i)})];
        e_last[last] = 1.0;
        const Vector u = solve(m.entries, b);
        const Vector g = solve(m.entries, e_last);
        b[last] = -u[last] / g[last];
        ext[MultiIndex({2 * d + 1})] = b[last];
        ext[MultiIndex({2 * d + 2})] = dot(b, solve(m.entries, b));
        v.because("M" + std::to_string(d) + " is positive definite: flat extension with y" + std::to_string(2 * d + 1) +
                  " = " + fmt(b[last]) + " minimizing y" + std::to_string(2 * d + 2));
    } else {
        const RecursiveResult rc = recursive_check(m, cfg);
        v.diagnostics["recursive"] = rc.pass ? "pass" : "fail";
        if (!rc.pass) {
            v.status = Status::NoMeasure;
            v.approximable = true;
            v.because("positive semidefinite but not recursively generated: " + rc.p->to_string() +
                      " = 0 while (" + rc.p->to_string() + ")*(" + rc.q->to_string() + ") is not");
            return v;
        }
        // Propagate the lowest relation x^r = -sum c_i x^i.
        const ColumnRelation rel = column_relations(m, cfg).front();
        const int r = rel.pivot.degree();
        for (int k = 2 * d + 1; k <= 2 * d + 2; ++k) {
            double s = 0.0;
            for (const auto& [a, c] : rel.polynomial.terms())
                if (a.degree() < r) s -= c * ext[MultiIndex({k - r + a.degree()})];
            ext[MultiIndex({k})] = s;
        }
        v.because("positive semidefinite and recursively generated: relation " + rel.polynomial.to_string() +
                  " = 0 propagates to a flat extension");
    }
    v.status = Status::ExistsNonConstructive;
    const FlatExtension flat = make_extension(m, moment_matrix(ext, d + 1), cfg);
    if (flat.rank_preserved) {
        if (auto mu = construct_from_flat(flat, y, cfg, kDefaultSeed)) {
            v.status = Status::MeasureConstructed;
            v.measure = std::move(mu);
            v.because("atoms from the flat extension, " + std::to_string(v.measure->size()) + " atoms");
        }
    }
    return v;
}

Matrix cubic_block(const MomentSequence& y) {
    if (y.n() != 2 || y.k() < 3) throw InvalidInput("cubic_block: requires bivariate moments of degree 3");
    return Matrix{{y.at({2, 0}), y.at({1, 1}), y.at({0, 2})},
                  {y.at({3, 0}), y.at({2, 1}), y.at({1, 2})},
                  {y.at({2, 1}), y.at({1, 2}), y.at({0, 3})}};
}

namespace {

double range_defect(const Matrix& m1, const Matrix& b, const ToleranceConfig& cfg) {
    const Matrix proj = Matrix::identity(m1.rows()) - m1 * pseudo_inverse_sym(m1, cfg);
    return (proj * b).frobenius_norm() / std::max({b.frobenius_norm(), m1.frobenius_norm(), 1e-300});
}

}  // namespace

Verdict cubic_solve(const MomentSequence& y, const ToleranceConfig& cfg, std::uint64_t seed) {
    if (y.n() != 2 || y.k() < 3) throw InvalidInput("cubic_solve: requires bivariate moments of degree 3");
    const MomentSequence y3 = y.truncated(3);
    const double y00 = y3.values()[0];
    if (!(y00 > 0.0)) throw InvalidInput("y00 must be positive");
    const Matrix m1 = moment_matrix(y3, 1).entries;
    const Matrix b = cubic_block(y3);
    const PsdStatus st = psd_status(m1, cfg);

    Verdict v;
    v.diagnostics["rank_M1"] = std::to_string(st.rank);
    v.diagnostics["psd"] = to_string(st.kind);
    if (st.kind == PsdClass::Indefinite) {
        v.status = Status::NoMeasure;
        v.because("M1(y) is not positive semidefinite");
        return v;
    }

    if (st.kind == PsdClass::PositiveDefinite) {
        // C(2) = [[y40, 0, y22], [0, y22, 0], [y22, 0, y04]] pushed `push` units (times y00) past B^T M1^-1 B per
        // pivot. Any push gives a positive definite M2; the flat search is retried over a few pushes.
        const Matrix s = b.transpose() * (inverse(m1) * b);
        v.because("M1(y) is positive definite: C(2) chosen successively large makes M2 positive definite");
        v.status = Status::ExistsNonConstructive;
        for (double push : {1.0, 4.0, 0.25, 16.0}) {
            MomentSequence y4(2, 4);
            for (const auto& a : monomial_basis(2, 3)) y4[a] = y3[a];
            const double y40 = s(0, 0) + push * y00;
            const double d00 = y40 - s(0, 0);
            const double d01 = -s(0, 1);
            const double y22 = s(1, 1) + d01 * d01 / d00 + push * y00;
            const double d11 = y22 - s(1, 1);
            const double d02 = y22 - s(0, 2);
            const double d12 = -s(1, 2);
            const double det = d00 * d11 - d01 * d01;
            const double quad = (d02 * (d11 * d02 - d01 * d12) + d12 * (d00 * d12 - d01 * d02)) / det;
            const double y04 = s(2, 2) + quad + push * y00;
            y4[MultiIndex({4, 0})] = y40;
            y4[MultiIndex({2, 2})] = y22;
            y4[MultiIndex({0, 4})] = y04;
            v.diagnostics["completion"] = "y40=" + fmt(y40) + " y22=" + fmt(y22) + " y04=" + fmt(y04);
            const Verdict q = decide_quartic(y4, cfg, seed);
            if (q.status == Status::MeasureConstructed && q.measure && verify_measure(y3, *q.measure, cfg).pass) {
                for (const auto& c : q.certificate) v.because(c);
                v.status = Status::MeasureConstructed;
                v.measure = q.measure;
                return v;
            }
        }
        v.because("flat search failed for every completion tried; the measure exists but was not constructed");
        return v;
    }

    const double defect = range_defect(m1, b, cfg);
    v.diagnostics["range_defect"] = fmt(defect);
    const bool in_range = defect <= 10.0 * cfg.rank_tol;
    v.diagnostics["range"] = in_range ? "pass" : "fail";
    if (!in_range) {
        v.status = Status::NoMeasure;
        v.because("Ran B(2) is not contained in Ran M1(y)");
        return v;
    }

    if (st.rank == 1) {
        AtomicMeasure mu;
        mu.add({y3.at({1, 0}) / y00, y3.at({0, 1}) / y00}, y00);
        if (!verify_measure(y3, mu, cfg).pass) {
            v.status = Status::NoMeasure;
            v.because("rank one but the single candidate atom does not reproduce the cubic moments");
            return v;
        }
        v.status = Status::MeasureConstructed;
        v.measure = std::move(mu);
        v.because("rank M1(y) = 1 and Ran B(2) in Ran M1(y): a single atom");
        return v;
    }

    // Rank 2: the kernel relation k0 + k1 x1 + k2 x2 must propagate through [M1 B].
    const Vector k = kernel_basis(m1, cfg).orthonormal.front();
    Matrix mb(3, 6);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            mb(i, j) = m1(i, j);
            mb(i, j + 3) = b(i, j);
        }
    const Vector shift1{0.0, k[0], 0.0, k[1], k[2], 0.0};
    const Vector shift2{0.0, 0.0, k[0], 0.0, k[1], k[2]};
    const double mbn = std::max(mb.frobenius_norm(), 1e-300);
    const double rec = std::max(norm2(mb * shift1) / (mbn * norm2(shift1)), norm2(mb * shift2) / (mbn * norm2(shift2)));
    v.diagnostics["recursive"] = rec <= 10.0 * cfg.rank_tol ? "pass" : "fail";
    if (rec > 10.0 * cfg.rank_tol) {
        v.status = Status::NoMeasure;
        v.because("the column relation of M1(y) does not propagate through [M1 B(2)]");
        return v;
    }
    const Matrix w = pseudo_inverse_sym(m1, cfg) * b;
    const Matrix c = (b.transpose() * w).symmetrized();
    const double hankel = std::abs(c(0, 2) - c(1, 1));
    if (hankel > cfg.moment_tol * (1.0 + c.max_abs())) {
        v.status = Status::NoMeasure;
        v.because("flat completion C = B^T W is not Hankel (defect " + fmt(hankel) + ")");
        return v;
    }
    MomentSequence y4(2, 4);
    for (const auto& a : monomial_basis(2, 3)) y4[a] = y3[a];
    y4[MultiIndex({4, 0})] = c(0, 0);
    y4[MultiIndex({3, 1})] = c(0, 1);
    y4[MultiIndex({2, 2})] = 0.5 * (c(0, 2) + c(1, 1));
    y4[MultiIndex({1, 3})] = c(1, 2);
    y4[MultiIndex({0, 4})] = c(2, 2);
    const FlatExtension flat = make_extension(moment_matrix(y4, 1), moment_matrix(y4, 2), cfg);
    v.status = Status::ExistsNonConstructive;
    v.because("rank M1(y) = 2, Ran B(2) in Ran M1(y) and the relation propagates: flat M2 with C = B^T W");
    if (flat.rank_preserved)
        if (auto mu = construct_from_flat(flat, y3, cfg, seed)) {
            v.status = Status::MeasureConstructed;
            v.measure = std::move(mu);
        }
    return v;
}

std::optional<QuarticApprox> quartic_approx(const MomentSequence& y, double eps, const ToleranceConfig& cfg,
                                            std::uint64_t seed) {
    if (y.n() != 2 || y.k() < 4) throw InvalidInput("quartic_approx: requires bivariate moments of degree 4");
    if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
    const MomentSequence y4 = y.truncated(4);
    const double y00 = y4.values()[0];

    // Match degree <= 3 with a cubic measure, then send eps-weighted atoms to infinity along the
    // directions of the leftover quartic form: weight eps at (c/eps)^{1/4} (1, t) contributes c (1, t)^4.
    const Verdict cub = cubic_solve(y4, cfg, seed);
    if (cub.measure) {
        const AtomicMeasure& nu = *cub.measure;
        const MomentSequence nm = moments_of_measure(nu, 2, 4);
        Vector r(5);
        for (int j = 0; j <= 4; ++j) r[static_cast<std::size_t>(j)] = y4.at({4 - j, j}) - nm.at({4 - j, j});
        const bool swapped = std::abs(r[0]) < std::abs(r[4]);
        if (swapped) std::reverse(r.begin(), r.end());
        std::optional<AtomicMeasure> dirs;
        if (norm_inf(r) <= cfg.moment_threshold(y4)) {
            dirs = AtomicMeasure{};
        } else if (r[0] > 0.0) {
            try {
                const Verdict uv = decide_univariate(MomentSequence(1, 4, r), cfg);
                if (uv.measure) dirs = uv.measure;
            } catch (const MomentError&) {
            }
        }
        if (dirs) {
            const double k = static_cast<double>(dirs->size());
            if (k * eps < y00) {
                QuarticApprox out;
                out.escaped = true;
                for (std::size_t i = 0; i < nu.size(); ++i) out.witness.add(nu.atoms[i], nu.weights[i] * (1.0 - k * eps / y00));
                for (std::size_t i = 0; i < dirs->size(); ++i) {
                    const double rad = std::pow(dirs->weights[i] / eps, 0.25);
                    const double t = dirs->atoms[i][0];
                    out.witness.add(swapped ? Vector{rad * t, rad} : Vector{rad, rad * t}, eps);
                }
                out.perturbed = moments_of_measure(out.witness, 2, 4);
                out.deviation = norm_inf(sub(out.perturbed.values(), y4.values()));
                return out;
            }
        }
    }

    // Fallback: push M2 into the interior with eps times the uniform 3x3 grid measure.
    AtomicMeasure grid;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) grid.add({static_cast<double>(a), static_cast<double>(b)}, y00 / 9.0);
    const MomentSequence gm = moments_of_measure(grid, 2, 4);
    MomentSequence target(2, 4, add(y4.values(), scale(gm.values(), eps)));
    const MomentMatrix m2 = moment_matrix(target, 2);
    if (psd_status(m2.entries, cfg).kind != PsdClass::PositiveDefinite) return std::nullopt;
    const auto flat = flat_search(m2, cfg, seeded(seed));
    if (!flat) return std::nullopt;
    const auto mu = construct_from_flat(*flat, target, cfg, seed);
    if (!mu) return std::nullopt;
    QuarticApprox out;
    out.witness = *mu;
    out.perturbed = moments_of_measure(out.witness, 2, 4);
    out.deviation = norm_inf(sub(out.perturbed.values(), y4.values()));
    return out;
}

}  // namespace moments
