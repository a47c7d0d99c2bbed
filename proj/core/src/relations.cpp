#include <algorithm>
#include <cmath>

#include "moments/errors.hpp"
#include "moments/quartic.hpp"

namespace moments {

namespace {

// Row reduction that solves for the highest monomial of each relation.
std::vector<Vector> echelon_high(std::vector<Vector> rows, std::vector<std::size_t>* pivots) {
    if (rows.empty()) return rows;
    const std::size_t n = rows.front().size();
    for (auto& r : rows) std::reverse(r.begin(), r.end());
    std::vector<std::size_t> piv;
    rows = echelonize(std::move(rows), &piv);
    for (auto& r : rows) std::reverse(r.begin(), r.end());
    for (auto& p : piv) p = n - 1 - p;
    if (pivots) *pivots = std::move(piv);
    return rows;
}

std::vector<ColumnRelation> relations_from_rows(const std::vector<Vector>& rows, int n, int d) {
    std::vector<std::size_t> piv;
    const auto ech = echelon_high(rows, &piv);
    const auto labels = monomial_basis(n, d);
    std::vector<ColumnRelation> out;
    for (std::size_t i = 0; i < ech.size(); ++i)
        out.push_back({Polynomial::from_vector(n, d, ech[i]), labels[piv[i]]});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.pivot < b.pivot; });
    return out;
}

}  // namespace

std::vector<ColumnRelation> column_relations(const MomentMatrix& m, const ToleranceConfig& cfg) {
    return relations_from_rows(kernel_basis(m.entries, cfg).orthonormal, m.n, m.d);
}

double relation_residual(const MomentMatrix& m, const Polynomial& p) {
    if (p.is_zero()) return 0.0;
    if (p.degree() > m.d) throw InvalidInput("relation degree exceeds the moment matrix order");
    const Vector ph = p.hat(m.d);
    const double mn = spectral_norm_sym(m.entries);
    if (mn == 0.0) return 0.0;
    return norm2(m.entries * ph) / (mn * norm2(ph));
}

bool relation_holds(const MomentMatrix& m, const Polynomial& p, const ToleranceConfig& cfg) {
    return relation_residual(m, p) <= 10.0 * cfg.rank_tol;
}

bool violates_recursiveness(const MomentMatrix& m, const Polynomial& p, const Polynomial& q, const ToleranceConfig& cfg) {
    const Polynomial pq = p * q;
    if (pq.degree() > m.d) throw InvalidInput("deg(pq) exceeds the moment matrix order");
    return relation_holds(m, p, cfg) && !relation_holds(m, pq, cfg);
}

RecursiveResult recursive_check(const MomentMatrix& m, const ToleranceConfig& cfg) {
    RecursiveResult res;
    const auto kernel = kernel_basis(m.entries, cfg).orthonormal;
    if (kernel.empty()) return res;
    const std::size_t size = m.size();
    const std::size_t dim = kernel.size();

    for (int j = 1; j <= m.d; ++j) {
        // Kernel vectors supported on degree <= d - j: null space of the high-degree rows.
        std::vector<std::size_t> high;
        for (std::size_t i = 0; i < size; ++i)
            if (m.labels[i].degree() > m.d - j) high.push_back(i);
        Matrix g(dim, dim);
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < dim; ++b)
                for (std::size_t h : high) g(a, b) += kernel[a][h] * kernel[b][h];
        const auto ge = sym_eigen(g);
        std::vector<Vector> low;
        for (std::size_t c = 0; c < dim; ++c) {
            if (ge.values[c] > 1e-14) continue;
            Vector v(size, 0.0);
            for (std::size_t a = 0; a < dim; ++a)
                for (std::size_t i = 0; i < size; ++i) v[i] += ge.vectors(a, c) * kernel[a][i];
            for (std::size_t h : high) v[h] = 0.0;
            low.push_back(std::move(v));
        }
        if (low.empty()) continue;

        for (const auto& rel : relations_from_rows(low, m.n, m.d)) {
            for (const auto& qa : monomial_basis(m.n, j)) {
                if (qa.degree() != j) continue;
                const Polynomial q = Polynomial::monomial(qa);
                const double r = relation_residual(m, rel.polynomial * q);
                if (r > 10.0 * cfg.rank_tol) {
                    res.pass = false;
                    res.p = rel.polynomial;
                    res.q = q;
                    res.residual = r;
                    return res;
                }
            }
        }
    }
    return res;
}

}  // namespace moments
