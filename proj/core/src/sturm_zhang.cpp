#include "moments/sturm_zhang.hpp"

#include <cmath>
#include <optional>
#include <vector>

#include "moments/errors.hpp"
#include "moments/symlin.hpp"

namespace moments {

double quad_form(const Matrix& q, const Vector& u) { return dot(u, q * u); }

std::pair<Vector, Vector> balance_pair(const Vector& ui, const Vector& uj, const Matrix& q, double delta) {
    const double a = quad_form(q, uj) - delta;
    const double b = dot(ui, q * uj);
    const double c = quad_form(q, ui) - delta;
    // a s^2 + 2 b s + c = 0; a*c <= 0 when the pair straddles delta, so the roots are real.
    double s = 0.0;
    if (c != 0.0) {
        const double disc = std::max(b * b - a * c, 0.0);
        const double qq = -(b + (b >= 0 ? 1.0 : -1.0) * std::sqrt(disc));
        if (qq != 0.0) s = c / qq;
    }
    const double inv = 1.0 / std::sqrt(1.0 + s * s);
    Vector w1(ui.size()), w2(ui.size());
    for (std::size_t k = 0; k < ui.size(); ++k) {
        w1[k] = (ui[k] + s * uj[k]) * inv;
        w2[k] = (-s * ui[k] + uj[k]) * inv;
    }
    return {w1, w2};
}

namespace {

// Cholesky columns in basis order, skipping a pivot whose Schur diagonal is below a tenth of the largest remaining
// one (growth stays bounded by 10 per step). Integer data with unit pivots factors exactly, which the eigenvector
// route cannot do. Absent when the column count disagrees with the rank or the reconstruction is poor.
std::optional<std::vector<Vector>> threshold_cholesky(const Matrix& x, const PsdStatus& st) {
    const std::size_t n = x.rows();
    Matrix s = x;
    std::vector<bool> used(n, false);
    std::vector<Vector> cols;
    while (cols.size() < st.rank) {
        double top = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!used[i]) top = std::max(top, s(i, i));
        if (!(top > st.rank_threshold)) break;
        std::size_t piv = n;
        for (std::size_t i = 0; i < n && piv == n; ++i)
            if (!used[i] && s(i, i) >= 0.1 * top) piv = i;
        used[piv] = true;
        const double d = std::sqrt(s(piv, piv));
        Vector c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (!used[i] || i == piv) c[i] = s(i, piv) / d;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s(i, j) -= c[i] * c[j];
        cols.push_back(std::move(c));
    }
    if (cols.size() != st.rank) return std::nullopt;
    Matrix recon(n, n);
    for (const auto& c : cols) recon += Matrix::outer(c, c);
    if ((x - recon).frobenius_norm() > 1e-12 * (1.0 + x.frobenius_norm())) return std::nullopt;
    return cols;
}

}  // namespace

RankOneDecomposition sz_decompose(const Matrix& x, const Matrix& q, const ToleranceConfig& cfg) {
    if (!x.square() || x.rows() != q.rows() || q.rows() != q.cols())
        throw InvalidInput("sz_decompose: shape mismatch");
    const PsdStatus st = psd_status(x, cfg);
    if (st.kind == PsdClass::Indefinite) throw NoMeasureError("matrix to decompose is indefinite");

    RankOneDecomposition out;
    if (auto g = threshold_cholesky(x, st)) {
        out.vectors = std::move(*g);
    } else {
        const SymEigen e = sym_eigen(x);
        for (std::size_t i = 0; i < e.values.size(); ++i)
            if (e.values[i] > st.rank_threshold) out.vectors.push_back(scale(e.vectors.col(i), std::sqrt(e.values[i])));
    }
    const std::size_t r = out.vectors.size();
    if (r == 0) {
        out.residual = x.frobenius_norm();
        return out;
    }

    std::vector<double> val(r);
    double total = 0.0;
    for (std::size_t i = 0; i < r; ++i) total += val[i] = quad_form(q, out.vectors[i]);
    const double delta = total / static_cast<double>(r);
    out.common_value = delta;

    const double tol = 1e-14 * (1.0 + q.frobenius_norm() * x.frobenius_norm());
    const double guard = 1e-12 * std::sqrt(x.frobenius_norm());
    std::vector<bool> active(r, true);
    for (std::size_t step = 0; step + 1 < r; ++step) {
        std::size_t hi = r, lo = r;
        for (std::size_t i = 0; i < r; ++i) {
            if (!active[i]) continue;
            if (hi == r || val[i] > val[hi]) hi = i;
            if (lo == r || val[i] < val[lo]) lo = i;
        }
        if (val[hi] - delta <= tol && delta - val[lo] <= tol) break;
        auto [w1, w2] = balance_pair(out.vectors[hi], out.vectors[lo], q, delta);
        if (norm2(w1) < guard || norm2(w2) < guard)
            throw NumericalError("sz_decompose: balanced vector collapsed to zero (rank misestimated)");
        out.vectors[hi] = std::move(w1);
        out.vectors[lo] = std::move(w2);
        val[hi] = quad_form(q, out.vectors[hi]);
        val[lo] = quad_form(q, out.vectors[lo]);
        active[hi] = false;
    }

    Matrix recon(x.rows(), x.cols());
    for (const auto& u : out.vectors) recon += Matrix::outer(u, u);
    out.residual = (x - recon).frobenius_norm();
    return out;
}

}  // namespace moments
