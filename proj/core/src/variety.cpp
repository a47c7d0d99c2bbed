#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>

#include "moments/errors.hpp"
#include "moments/quadratic.hpp"
#include "moments/quartic.hpp"

namespace moments {

const char* to_string(VarietyKind k) {
    switch (k) {
        case VarietyKind::Empty: return "empty";
        case VarietyKind::Finite: return "finite";
        case VarietyKind::Infinite: return "infinite";
    }
    return "?";
}

namespace {

using Poly1 = std::vector<double>;  // ascending powers of x1

Poly1 pmul(const Poly1& a, const Poly1& b) {
    Poly1 r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly1 psub(const Poly1& a, const Poly1& b) {
    Poly1 r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    return r;
}

Poly1 pscale(const Poly1& a, double s) {
    Poly1 r(a);
    for (double& v : r) v *= s;
    return r;
}

double peval(const Poly1& a, double x) {
    double r = 0.0;
    for (std::size_t i = a.size(); i-- > 0;) r = r * x + a[i];
    return r;
}

std::vector<double> real_roots(Poly1 p) {
    double big = 0.0;
    for (double v : p) big = std::max(big, std::abs(v));
    while (!p.empty() && std::abs(p.back()) <= 1e-12 * big) p.pop_back();
    std::vector<double> out;
    if (p.size() <= 1) return out;
    const int m = static_cast<int>(p.size()) - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
    for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) comp(i, m - 1) = -p[static_cast<std::size_t>(i)] / p.back();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < m; ++i) {
        const std::complex<double> z = es.eigenvalues()(i);
        if (std::abs(z.imag()) <= 1e-7 * (1.0 + std::abs(z.real()))) out.push_back(z.real());
    }
    return out;
}

// c + 2 b^T x + x^T A x, normalized so the largest coefficient has magnitude 1.
struct Conic {
    double c = 0.0;
    double b[2] = {0.0, 0.0};
    double a[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    double operator()(double x1, double x2) const {
        return c + 2.0 * (b[0] * x1 + b[1] * x2) + a[0][0] * x1 * x1 + 2.0 * a[0][1] * x1 * x2 + a[1][1] * x2 * x2;
    }
    void grad(double x1, double x2, double g[2]) const {
        g[0] = 2.0 * (b[0] + a[0][0] * x1 + a[0][1] * x2);
        g[1] = 2.0 * (b[1] + a[0][1] * x1 + a[1][1] * x2);
    }
    // In x2 with x1-coefficients: qa x2^2 + qb(x1) x2 + qc(x1).
    double qa() const { return a[1][1]; }
    Poly1 qb() const { return {2.0 * b[1], 2.0 * a[0][1]}; }
    Poly1 qc() const { return {c, 2.0 * b[0], a[0][0]}; }
};

Conic to_conic(const Polynomial& p) {
    const QuadraticConstraint q = split_quadratic(p);
    Conic k;
    k.c = q.q0;
    for (std::size_t i = 0; i < 2; ++i) {
        k.b[i] = q.q1[i];
        for (std::size_t j = 0; j < 2; ++j) k.a[i][j] = q.Q2(i, j);
    }
    const double big = std::max(q.Q.max_abs(), 1e-300);
    k.c /= big;
    for (std::size_t i = 0; i < 2; ++i) {
        k.b[i] /= big;
        for (std::size_t j = 0; j < 2; ++j) k.a[i][j] /= big;
    }
    return k;
}

// Coordinates x' = R x with a fixed irrational angle, so no relation is degenerate in x2' by accident.
constexpr double kTheta = 0.6180339887498949;

Conic rotated(const Conic& k) {
    const double cs = std::cos(kTheta), sn = std::sin(kTheta);
    const double r[2][2] = {{cs, -sn}, {sn, cs}};
    Conic out;
    out.c = k.c;
    for (int i = 0; i < 2; ++i) out.b[i] = r[i][0] * k.b[0] + r[i][1] * k.b[1];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double s = 0.0;
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q) s += r[i][p] * k.a[p][q] * r[j][q];
            out.a[i][j] = s;
        }
    return out;
}

Vector unrotate(double x1, double x2) {
    const double cs = std::cos(kTheta), sn = std::sin(kTheta);
    return {cs * x1 + sn * x2, -sn * x1 + cs * x2};
}

VarietyReport single_conic(const Conic& k) {
    const Matrix a{{k.a[0][0], k.a[0][1]}, {k.a[1][0], k.a[1][1]}};
    const auto e = sym_eigen(a);
    constexpr double tiny = 1e-10;
    const double l1 = e.values[0], l2 = e.values[1];
    const Vector b{k.b[0], k.b[1]};
    VarietyReport rep;
    if (std::abs(l1) <= tiny && std::abs(l2) <= tiny) {
        rep.kind = norm2(b) > tiny ? VarietyKind::Infinite : VarietyKind::Empty;
        return rep;
    }
    if (l1 > tiny && l2 < -tiny) {
        rep.kind = VarietyKind::Infinite;
        return rep;
    }
    if (std::abs(l1) > tiny && std::abs(l2) > tiny) {
        const Vector xs = scale(solve(a, b), -1.0);
        const double v = k(xs[0], xs[1]);
        if (std::abs(v) <= tiny * (1.0 + dot(xs, xs))) {
            rep.kind = VarietyKind::Finite;
            rep.points.push_back(xs);
        } else {
            rep.kind = v * l1 < 0 ? VarietyKind::Infinite : VarietyKind::Empty;
        }
        return rep;
    }
    // Rank one: parabola, a pair of parallel lines, a double line, or nothing.
    const std::size_t nz = std::abs(l1) > tiny ? 0 : 1;
    const double lam = e.values[nz];
    const Vector u = e.vectors.col(nz), w = e.vectors.col(1 - nz);
    if (std::abs(dot(b, w)) > tiny) {
        rep.kind = VarietyKind::Infinite;
        return rep;
    }
    const double bu = dot(b, u);
    rep.kind = bu * bu - lam * k.c >= -tiny ? VarietyKind::Infinite : VarietyKind::Empty;
    return rep;
}

double relation_scale(const Vector& x) { return 1e-6 * (1.0 + dot(x, x)); }

}  // namespace

VarietyReport conic_variety(const std::vector<Polynomial>& relations) {
    std::vector<Conic> conics;
    for (const auto& p : relations) {
        if (p.is_zero()) continue;
        if (p.n() != 2) throw InvalidInput("conic_variety: relations must be bivariate");
        if (p.degree() > 2) throw InvalidInput("conic_variety: relation degree exceeds 2");
        if (p.degree() == 0) return {VarietyKind::Empty, {}};
        conics.push_back(to_conic(p));
    }
    if (conics.empty()) return {VarietyKind::Infinite, {}};
    if (conics.size() == 1) return single_conic(conics.front());

    std::vector<Conic> rot;
    for (const auto& k : conics) rot.push_back(rotated(k));

    for (std::size_t i = 0; i < rot.size(); ++i) {
        for (std::size_t j = i + 1; j < rot.size(); ++j) {
            Conic p1 = rot[i], p2 = rot[j];
            if (std::abs(p1.qa()) < std::abs(p2.qa())) std::swap(p1, p2);
            const double a1 = p1.qa(), a2 = p2.qa();
            const Poly1 b1 = p1.qb(), b2 = p2.qb(), c1 = p1.qc(), c2 = p2.qc();
            Poly1 res;
            if (std::abs(a1) <= 1e-12) {
                res = psub(pmul(b1, c2), pmul(b2, c1));
            } else {
                const Poly1 ac = psub(pscale(c2, a1), pscale(c1, a2));
                const Poly1 ab = psub(pscale(b2, a1), pscale(b1, a2));
                res = psub(pmul(ac, ac), pmul(ab, psub(pmul(b1, c2), pmul(b2, c1))));
            }
            double big = 0.0;
            for (double v : res) big = std::max(big, std::abs(v));
            if (big <= 1e-10) continue;  // common factor: this pair meets along a curve

            VarietyReport rep;
            for (double x1 : real_roots(res)) {
                std::vector<double> x2s;
                for (const Conic* k : {&p1, &p2}) {
                    const double qa = k->qa(), qb = peval(k->qb(), x1), qc = peval(k->qc(), x1);
                    if (std::abs(qa) <= 1e-12) {
                        if (std::abs(qb) > 1e-12) x2s.push_back(-qc / qb);
                        continue;
                    }
                    double disc = qb * qb - 4.0 * qa * qc;
                    if (disc < -1e-8 * (1.0 + qb * qb)) continue;
                    disc = std::sqrt(std::max(disc, 0.0));
                    x2s.push_back((-qb + disc) / (2.0 * qa));
                    x2s.push_back((-qb - disc) / (2.0 * qa));
                }
                for (double x2 : x2s) {
                    double u = x1, v = x2;
                    for (int it = 0; it < 2; ++it) {
                        double g1[2], g2[2];
                        p1.grad(u, v, g1);
                        p2.grad(u, v, g2);
                        const double det = g1[0] * g2[1] - g1[1] * g2[0];
                        if (std::abs(det) <= 1e-12) break;
                        const double f1 = p1(u, v), f2 = p2(u, v);
                        u -= (f1 * g2[1] - f2 * g1[1]) / det;
                        v -= (g1[0] * f2 - g2[0] * f1) / det;
                    }
                    const Vector x = unrotate(u, v);
                    bool ok = true;
                    for (const auto& k : conics) ok = ok && std::abs(k(x[0], x[1])) <= relation_scale(x);
                    if (!ok) continue;
                    const bool dup = std::any_of(rep.points.begin(), rep.points.end(), [&](const Vector& p) {
                        return norm2(sub(p, x)) <= 1e-6 * (1.0 + norm2(x));
                    });
                    if (!dup) rep.points.push_back(x);
                }
            }
            rep.kind = rep.points.empty() ? VarietyKind::Empty : VarietyKind::Finite;
            std::sort(rep.points.begin(), rep.points.end());
            return rep;
        }
    }
    return {VarietyKind::Infinite, {}};
}

VarietyReport variety_count(const MomentMatrix& m, const ToleranceConfig& cfg) {
    if (m.n != 2 || m.d != 2) throw InvalidInput("variety_count: requires a bivariate M_2");
    std::vector<Polynomial> rels;
    for (const auto& r : column_relations(m, cfg)) rels.push_back(r.polynomial);
    return conic_variety(rels);
}

}  // namespace moments
