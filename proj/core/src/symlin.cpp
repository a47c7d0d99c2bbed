#include "moments/symlin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "moments/errors.hpp"

namespace moments {

SymEigen sym_eigen(const Matrix& input) {
    if (!input.square()) throw InvalidInput("sym_eigen needs a square matrix");
    if (!input.all_finite()) throw InvalidInput("sym_eigen: non-finite entry");
    const std::size_t n = input.rows();
    Matrix a = input.symmetrized();
    Matrix v = Matrix::identity(n);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off == 0.0) break;

        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                // Negligible against both diagonals: drop it rather than rotate.
                const double g = 100.0 * std::abs(apq);
                if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150)
                    t = 0.5 / theta;
                else
                    t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = c * arp - s * arq;
                    a(r, q) = a(q, r) = c * arq + s * arp;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SymEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        out.values[k] = a(src, src);
        // Sign convention: largest-magnitude component positive.
        std::size_t big = 0;
        for (std::size_t r = 0; r < n; ++r)
            if (std::abs(v(r, src)) > std::abs(v(big, src)) + 1e-14) big = r;
        const double sign = v(big, src) < 0 ? -1.0 : 1.0;
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = sign * v(r, src);
    }
    return out;
}

double min_eigenvalue(const Matrix& a) {
    if (a.rows() == 0) return 0.0;
    return sym_eigen(a).values.back();
}

double spectral_norm_sym(const Matrix& a) {
    if (a.rows() == 0) return 0.0;
    const auto e = sym_eigen(a);
    return std::max(std::abs(e.values.front()), std::abs(e.values.back()));
}

namespace {

PsdStatus classify(const Vector& vals, const ToleranceConfig& cfg) {
    PsdStatus s;
    const std::size_t n = vals.size();
    for (double x : vals) s.max_abs_eig = std::max(s.max_abs_eig, std::abs(x));
    s.min_eig = n ? vals.back() : 0.0;
    s.rank_threshold = cfg.rank_threshold(n, s.max_abs_eig);
    s.psd_threshold = cfg.psd_threshold(n, s.max_abs_eig);
    for (double x : vals)
        if (x > s.rank_threshold) ++s.rank;
    if (n && s.min_eig < -s.psd_threshold)
        s.kind = PsdClass::Indefinite;
    else if (s.rank == n)
        s.kind = PsdClass::PositiveDefinite;
    else
        s.kind = PsdClass::PositiveSemidefiniteSingular;
    return s;
}

}  // namespace

PsdStatus psd_status(const Matrix& a, const ToleranceConfig& cfg) { return classify(sym_eigen(a).values, cfg); }

const char* to_string(PsdClass k) {
    switch (k) {
        case PsdClass::PositiveDefinite: return "PositiveDefinite";
        case PsdClass::PositiveSemidefiniteSingular: return "PositiveSemidefiniteSingular";
        case PsdClass::Indefinite: return "Indefinite";
    }
    return "?";
}

std::vector<Vector> echelonize(std::vector<Vector> rows, std::vector<std::size_t>* pivots) {
    constexpr double kPivotMin = 1e-6;
    if (pivots) pivots->clear();
    if (rows.empty()) return rows;
    const std::size_t cols = rows.front().size();
    std::size_t done = 0;
    for (std::size_t c = 0; c < cols && done < rows.size(); ++c) {
        std::size_t best = done;
        for (std::size_t r = done; r < rows.size(); ++r)
            if (std::abs(rows[r][c]) > std::abs(rows[best][c])) best = r;
        if (std::abs(rows[best][c]) < kPivotMin) continue;
        std::swap(rows[done], rows[best]);
        const double pv = rows[done][c];
        for (double& x : rows[done]) x /= pv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == done) continue;
            const double f = rows[r][c];
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < cols; ++k) rows[r][k] -= f * rows[done][k];
        }
        if (pivots) pivots->push_back(c);
        ++done;
    }
    rows.resize(done);
    for (auto& row : rows)
        for (double& x : row)
            if (std::abs(x) < 1e-12) x = 0.0;
    return rows;
}

KernelBasis kernel_basis(const Matrix& a, const ToleranceConfig& cfg) {
    const auto e = sym_eigen(a);
    const auto st = classify(e.values, cfg);
    KernelBasis kb;
    for (std::size_t i = 0; i < e.values.size(); ++i)
        if (std::abs(e.values[i]) <= st.rank_threshold) kb.orthonormal.push_back(e.vectors.col(i));
    kb.echelon = echelonize(kb.orthonormal, &kb.pivots);
    return kb;
}

double frobenius(const Matrix& r, const Matrix& s) {
    if (r.rows() != s.rows() || r.cols() != s.cols()) throw InvalidInput("frobenius: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < r.data().size(); ++i) acc += r.data()[i] * s.data()[i];
    return acc;
}

SchurBlocks schur_blocks(const Matrix& a, std::size_t split) {
    if (!a.square() || split == 0 || split >= a.rows()) throw InvalidInput("schur_blocks: bad split");
    const std::size_t m = a.rows() - split;
    return {a.block(0, 0, split, split), a.block(0, split, split, m), a.block(split, split, m, m)};
}

SchurBlocks inverse_blocks(const Matrix& a, std::size_t split, const ToleranceConfig& cfg) {
    const std::size_t n = a.rows();
    // Condition estimate after symmetric diagonal equilibration.
    Matrix eq(a);
    Vector d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = a(i, i) > 0.0 ? 1.0 / std::sqrt(a(i, i)) : 1.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) eq(i, j) *= d[i] * d[j];
    const auto ev = sym_eigen(eq).values;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double x : ev) {
        lo = std::min(lo, std::abs(x));
        hi = std::max(hi, std::abs(x));
    }
    if (lo == 0.0 || hi / lo > 1.0 / cfg.rank_tol) throw NumericalError("inverse_blocks: matrix is numerically singular");

    const Matrix inv = inverse(a).symmetrized();
    SchurBlocks out = schur_blocks(inv, split);
    if (n - split == 1) {
        const SchurBlocks b = schur_blocks(a, split);
        const double delta = b.bottom_right(0, 0);
        Matrix s = b.top_left - Matrix::outer(b.top_right.col(0), b.top_right.col(0)) * (1.0 / delta);
        const Matrix p = inverse(s);
        if ((p - out.top_left).frobenius_norm() > 1e-8 * std::max(1.0, out.top_left.frobenius_norm()))
            throw NumericalError("inverse_blocks: Schur complement inverse disagrees with the inverse block");
    }
    return out;
}

namespace {

double pencil_min(const Matrix& f, const Matrix& q, double t, double* max_abs) {
    const auto e = sym_eigen(f - q * t);
    if (max_abs) *max_abs = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    return e.values.back();
}

}  // namespace

PencilResult pencil_feasible(const Matrix& f, const Matrix& q, PencilDomain domain, const ToleranceConfig& cfg) {
    if (f.rows() != q.rows() || f.cols() != q.cols() || !f.square()) throw InvalidInput("pencil: shape mismatch");
    const std::size_t n = f.rows();
    const double data_scale = std::max({1.0, spectral_norm_sym(f), spectral_norm_sym(q)});
    const double early = 1e-14 * static_cast<double>(n) * data_scale;
    constexpr double kCap = 1e12;

    PencilResult best;
    best.min_eig = -std::numeric_limits<double>::infinity();
    auto eval = [&](double t) {
        const double g = pencil_min(f, q, t, nullptr);
        if (g > best.min_eig) {
            best.min_eig = g;
            best.t = t;
        }
        return g;
    };
    auto done = [&](double g, double t) {
        if (g >= -early) {
            best.t = t;
            best.min_eig = g;
            best.feasible = true;
            return true;
        }
        return false;
    };

    // Walk outward from 0 in one direction while lambda_min keeps improving.
    auto expand = [&](double dir, double g1, double& a, double& b) -> bool {
        double t_prev2 = 0.0, t_prev = dir, g_prev = g1;
        while (true) {
            const double t_next = t_prev * 4.0;
            if (std::abs(t_next) > kCap) {
                a = t_prev2;
                b = t_prev;
                return false;
            }
            const double g = eval(t_next);
            if (done(g, t_next)) return true;
            if (g <= g_prev + early) {
                a = t_prev2;
                b = t_next;
                return true;
            }
            t_prev2 = t_prev;
            t_prev = t_next;
            g_prev = g;
        }
    };

    const double g0 = eval(0.0);
    if (done(g0, 0.0)) return best;
    const double gp = eval(1.0);
    if (done(gp, 1.0)) return best;
    double a = 0.0, b = 1.0;
    bool bracketed = true;
    if (gp > g0 + early) {
        bracketed = expand(1.0, gp, a, b);
        if (best.feasible) return best;
    } else if (domain == PencilDomain::Real) {
        const double gm = eval(-1.0);
        if (done(gm, -1.0)) return best;
        if (gm > g0 + early) {
            bracketed = expand(-1.0, gm, a, b);
            if (best.feasible) return best;
        } else {
            a = -1.0;
            b = 1.0;
        }
    }
    if (a > b) std::swap(a, b);
    if (!bracketed) {
        best.unbounded = true;
        best.feasible = false;
        return best;
    }

    for (int it = 0; it < 300 && b - a > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        const double m1 = a + (b - a) / 3.0;
        const double m2 = b - (b - a) / 3.0;
        if (eval(m1) < eval(m2))
            a = m1;
        else
            b = m2;
    }
    double max_abs = 0.0;
    const double g = pencil_min(f, q, best.t, &max_abs);
    best.min_eig = g;
    best.feasible = g >= -cfg.psd_threshold(n, max_abs);
    return best;
}

std::optional<Matrix> cholesky(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = a(j, j);
        for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
        if (!(s > 0.0)) return std::nullopt;
        l(j, j) = std::sqrt(s);
        for (std::size_t i = j + 1; i < n; ++i) {
            double t = a(i, j);
            for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
            l(i, j) = t / l(j, j);
        }
    }
    return l;
}

namespace {

struct Lu {
    Matrix lu;
    std::vector<std::size_t> perm;
};

Lu lu_decompose(const Matrix& a) {
    if (!a.square()) throw InvalidInput("LU needs a square matrix");
    const std::size_t n = a.rows();
    Lu f{a, std::vector<std::size_t>(n)};
    std::iota(f.perm.begin(), f.perm.end(), 0);
    const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(f.lu(i, k)) > std::abs(f.lu(p, k))) p = i;
        if (std::abs(f.lu(p, k)) <= 1e-300 * scale || f.lu(p, k) == 0.0) throw NumericalError("LU: singular matrix");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
            std::swap(f.perm[k], f.perm[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = f.lu(i, k) / f.lu(k, k);
            f.lu(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
        }
    }
    return f;
}

Vector lu_solve(const Lu& f, const Vector& b) {
    const std::size_t n = f.lu.rows();
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[f.perm[i]];
        for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
        x[i] = s / f.lu(i, i);
    }
    return x;
}

}  // namespace

Vector solve(const Matrix& a, const Vector& b) {
    if (a.rows() != b.size()) throw InvalidInput("solve: shape mismatch");
    return lu_solve(lu_decompose(a), b);
}

Matrix inverse(const Matrix& a) {
    const Lu f = lu_decompose(a);
    const std::size_t n = a.rows();
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vector e(n, 0.0);
        e[j] = 1.0;
        inv.set_col(j, lu_solve(f, e));
    }
    return inv;
}

Matrix pseudo_inverse_sym(const Matrix& a, const ToleranceConfig& cfg) {
    const auto e = sym_eigen(a);
    const auto st = classify(e.values, cfg);
    const std::size_t n = a.rows();
    Matrix p(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(e.values[k]) <= st.rank_threshold) continue;
        const double inv = 1.0 / e.values[k];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) p(i, j) += inv * e.vectors(i, k) * e.vectors(j, k);
    }
    return p;
}

}  // namespace moments
