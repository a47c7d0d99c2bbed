#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "internal.hpp"
#include "moments/errors.hpp"
#include "moments/quartic.hpp"

namespace moments {

namespace detail {

MomentSequence averaged_moments(const MomentMatrix& m) {
    MomentSequence y(m.n, 2 * m.d);
    std::vector<int> count(y.size(), 0);
    Vector sum(y.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) {
            const std::size_t idx = basis_index(m.labels[i] + m.labels[j]);
            sum[idx] += m.entries(i, j);
            ++count[idx];
        }
    Vector vals(y.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = sum[i] / count[i];
    return MomentSequence(m.n, 2 * m.d, std::move(vals));
}

std::optional<AtomicMeasure> fit_weights(const MomentSequence& y, const std::vector<Vector>& atoms,
                                         const ToleranceConfig& cfg) {
    if (atoms.empty()) return std::nullopt;
    const auto basis = monomial_basis(y.n(), y.k());
    const std::size_t r = atoms.size();
    Matrix v(basis.size(), r);
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t i = 0; i < r; ++i) v(a, i) = monomial_value(basis[a], atoms[i]);
    const Matrix vt = v.transpose();
    Vector w;
    try {
        w = solve(vt * v, vt * y.values());
    } catch (const MomentError&) {
        return std::nullopt;
    }
    AtomicMeasure mu;
    for (std::size_t i = 0; i < r; ++i) {
        if (!(w[i] > 0.0)) return std::nullopt;
        mu.add(atoms[i], w[i]);
    }
    if (!verify_measure(y, mu, cfg).pass) return std::nullopt;
    return mu;
}

}  // namespace detail

FlatExtension make_extension(const MomentMatrix& base, const MomentMatrix& extended, const ToleranceConfig& cfg) {
    if (base.n != extended.n || extended.d != base.d + 1)
        throw InvalidInput("extension must add exactly one degree to the base");
    FlatExtension f{base, extended, false};
    const double scale = 1.0 + base.entries.max_abs();
    for (std::size_t i = 0; i < base.size(); ++i)
        for (std::size_t j = 0; j < base.size(); ++j)
            if (std::abs(extended.entries(i, j) - base.entries(i, j)) > 1e-12 * scale) return f;
    const PsdStatus sb = psd_status(base.entries, cfg);
    const PsdStatus se = psd_status(extended.entries, cfg);
    f.rank_preserved = se.kind != PsdClass::Indefinite && sb.kind != PsdClass::Indefinite && sb.rank == se.rank;
    return f;
}

namespace {

AtomicMeasure extract_once(const FlatExtension& flat, const ToleranceConfig& cfg, std::mt19937_64& rng) {
    const MomentMatrix& base = flat.base;
    const int n = base.n;
    const std::size_t size = base.size();
    const MomentSequence yt = detail::averaged_moments(flat.extended);

    const SymEigen e = sym_eigen(base.entries);
    const PsdStatus st = psd_status(base.entries, cfg);
    const std::size_t r = st.rank;
    if (r == 0) throw NumericalError("extract_atoms: zero moment matrix");

    // M_d = L L^T with L = V_r Lambda^{1/2}; T_j = L^+ M^(x_j) L^+T share eigenvectors.
    Matrix lp(r, size);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t c = 0; c < size; ++c) lp(i, c) = e.vectors(c, i) / std::sqrt(e.values[i]);
    std::vector<Matrix> ops;
    double op_scale = 1.0;
    for (int j = 0; j < n; ++j) {
        Matrix mx(size, size);
        for (std::size_t a = 0; a < size; ++a)
            for (std::size_t b = 0; b < size; ++b) mx(a, b) = yt[base.labels[a] + base.labels[b] + MultiIndex::unit(n, j)];
        ops.push_back((lp * mx * lp.transpose()).symmetrized());
        op_scale = std::max(op_scale, ops.back().max_abs());
    }

    std::normal_distribution<double> gauss;
    Matrix mix(r, r);
    for (const auto& t : ops) mix += t * gauss(rng);
    const SymEigen me = sym_eigen(mix);

    std::vector<Vector> atoms;
    for (std::size_t i = 0; i < r; ++i) {
        const Vector o = me.vectors.col(i);
        Vector x(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const Vector to = ops[static_cast<std::size_t>(j)] * o;
            x[static_cast<std::size_t>(j)] = dot(o, to);
            if (norm2(sub(to, scale(o, x[static_cast<std::size_t>(j)]))) > 1e-6 * op_scale)
                throw NumericalError("extract_atoms: joint diagonalization residual too large");
        }
        atoms.push_back(std::move(x));
    }

    // Weights from the first column of M_d: sum_i w_i x_i^alpha = y_alpha, |alpha| <= d.
    Matrix v(size, r);
    Vector rhs(size);
    for (std::size_t a = 0; a < size; ++a) {
        rhs[a] = base.entries(a, 0);
        for (std::size_t i = 0; i < r; ++i) v(a, i) = monomial_value(base.labels[a], atoms[i]);
    }
    const Matrix vt = v.transpose();
    const Vector w = solve(vt * v, vt * rhs);
    AtomicMeasure mu;
    for (std::size_t i = 0; i < r; ++i) {
        if (!(w[i] > 0.0)) throw NumericalError("extract_atoms: nonpositive weight");
        mu.add(atoms[i], w[i]);
    }
    if (!verify_measure(detail::averaged_moments(base), mu, cfg).pass)
        throw NumericalError("extract_atoms: extracted measure fails moment verification");
    return mu;
}

}  // namespace

AtomicMeasure extract_atoms(const FlatExtension& flat, const ToleranceConfig& cfg, std::uint64_t seed) {
    if (!flat.rank_preserved) throw PreconditionError("extract_atoms: extension is not flat");
    std::mt19937_64 rng(seed);
    // A second random combination separates eigenvalues that nearly collide in the first.
    for (int attempt = 0;; ++attempt) {
        try {
            return extract_once(flat, cfg, rng);
        } catch (const NumericalError&) {
            if (attempt == 2) throw;
        }
    }
}

namespace {

struct FlatProblem {
    MomentSequence y4;
    Matrix m2;
    Matrix m2_pinv;
    Matrix range_proj;  // I - M2 M2^+
    bool singular = false;
    std::vector<MultiIndex> labels;   // degree <= 3
    std::vector<MultiIndex> deg5;     // the six degree-5 moments
    std::vector<std::size_t> free;    // indices into deg5
    Vector pinned_values;             // value per deg5 slot when pinned
    double scale = 1.0;

    Matrix block_b(const Vector& z5) const {
        Matrix b(6, 4);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                const MultiIndex a = labels[i] + labels[6 + j];
                if (a.degree() <= 4) {
                    b(i, j) = y4[a];
                } else {
                    const auto pos = static_cast<std::size_t>(std::find(deg5.begin(), deg5.end(), a) - deg5.begin());
                    b(i, j) = z5[pos];
                }
            }
        return b;
    }

    Vector full(const Vector& z) const {
        Vector z5 = pinned_values;
        for (std::size_t k = 0; k < free.size(); ++k) z5[free[k]] = z[k];
        return z5;
    }

    Vector residual(const Vector& z) const {
        const Matrix b = block_b(full(z));
        const Matrix c = b.transpose() * m2_pinv * b;
        // Hankel defects of C: (4,2), (3,3), (2,4) each appear twice.
        Vector r{c(0, 2) - c(1, 1), c(0, 3) - c(1, 2), c(1, 3) - c(2, 2)};
        if (singular) {
            const Matrix d = range_proj * b;
            for (double v : d.data()) r.push_back(v);
        }
        for (double& v : r) v /= scale;
        return r;
    }

    // Residual level accepted as zero; Hankel defects of C are cancellations among entries of size |C|.
    double accept(const Vector& z) const {
        const Matrix b = block_b(full(z));
        const double c = (b.transpose() * m2_pinv * b).max_abs() / scale;
        return 1e-10 * (1.0 + c);
    }
};

// Least-squares functor for Eigen's MINPACK port; residuals are zero-padded so there are never fewer
// equations than unknowns.
struct FlatFunctor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const FlatProblem* p;
    int n_in;
    int n_out;

    int inputs() const { return n_in; }
    int values() const { return n_out; }
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
        const Vector r = p->residual(Vector(x.data(), x.data() + x.size()));
        fvec.setZero(n_out);
        for (std::size_t i = 0; i < r.size(); ++i) fvec(static_cast<Eigen::Index>(i)) = r[i];
        return 0;
    }
};

std::optional<Vector> levenberg_marquardt(const FlatProblem& p, const Vector& z0) {
    const int f = static_cast<int>(z0.size());
    if (f == 0) {
        const Vector r = p.residual(z0);
        return std::sqrt(dot(r, r)) <= p.accept(z0) ? std::optional<Vector>(z0) : std::nullopt;
    }
    FlatFunctor fun{&p, f, std::max(f, static_cast<int>(p.residual(z0).size()))};
    Eigen::NumericalDiff<FlatFunctor> diff(fun);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<FlatFunctor>, double> lm(diff);
    lm.parameters.xtol = 1e-15;
    lm.parameters.ftol = 1e-15;
    lm.parameters.maxfev = 2000;
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(z0.data(), f);
    lm.minimize(x);
    const Vector z(x.data(), x.data() + x.size());
    const Vector r = p.residual(z);
    if (!(std::sqrt(dot(r, r)) <= p.accept(z))) return std::nullopt;
    return z;
}

}  // namespace

std::optional<FlatExtension> flat_search(const MomentMatrix& m2, const ToleranceConfig& cfg,
                                         const FlatSearchOptions& opts) {
    if (m2.n != 2 || m2.d != 2) throw InvalidInput("flat_search: requires a bivariate M_2");
    const PsdStatus st = psd_status(m2.entries, cfg);
    if (st.kind == PsdClass::Indefinite) throw PreconditionError("flat_search: M_2 is not positive semidefinite");

    FlatProblem p;
    p.y4 = detail::averaged_moments(m2);
    p.m2 = m2.entries;
    p.m2_pinv = pseudo_inverse_sym(m2.entries, cfg);
    p.singular = st.kind != PsdClass::PositiveDefinite;
    p.range_proj = Matrix::identity(6) - m2.entries * p.m2_pinv;
    p.labels = monomial_basis(2, 3);
    for (const auto& a : monomial_basis(2, 5))
        if (a.degree() == 5) p.deg5.push_back(a);
    p.pinned_values = Vector(6, 0.0);
    for (std::size_t k = 0; k < 6; ++k) {
        const auto it = opts.pinned.find(p.deg5[k]);
        if (it == opts.pinned.end())
            p.free.push_back(k);
        else
            p.pinned_values[k] = it->second;
    }
    p.scale = 1.0 + p.y4.norm_inf();

    const double y0 = p.y4.values()[0];
    double top = 0.0;
    for (const auto& a : monomial_basis(2, 4))
        if (a.degree() == 4) top = std::max(top, std::abs(p.y4[a]));
    const double rho = std::pow(std::max(top / y0, 1e-300), 0.25);
    const double sigma = y0 * std::pow(rho, 5.0);

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    for (int s = 0; s < opts.starts; ++s) {
        Vector z(p.free.size(), 0.0);
        // Start spreads cycle over 1, 4, 16, 64 times sigma: near-singular M_2 pushes the solutions far out.
        const double spread = sigma * std::pow(4.0, (s - 1) % 4);
        if (s > 0)
            for (double& v : z) v = spread * gauss(rng);
        const auto sol = levenberg_marquardt(p, z);
        if (!sol) continue;

        // Assemble a Hankel-consistent M_3 from the solution.
        const Matrix b = p.block_b(p.full(*sol));
        const Matrix c = (b.transpose() * p.m2_pinv * b).symmetrized();
        MomentSequence y6(2, 6);
        for (const auto& a : monomial_basis(2, 4)) y6[a] = p.y4[a];
        const Vector z5 = p.full(*sol);
        for (std::size_t k = 0; k < 6; ++k) y6[p.deg5[k]] = z5[k];
        std::vector<int> seen(y6.size(), 0);
        MomentSequence acc(2, 6);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                const MultiIndex a = p.labels[6 + i] + p.labels[6 + j];
                acc[a] += c(i, j);
                ++seen[basis_index(a)];
            }
        for (const auto& a : monomial_basis(2, 6))
            if (a.degree() == 6) y6[a] = acc[a] / seen[basis_index(a)];

        const MomentMatrix m3 = moment_matrix(y6, 3);
        MomentMatrix base = m2;
        const FlatExtension flat = make_extension(base, m3, cfg);
        if (!flat.rank_preserved) continue;
        try {
            (void)extract_atoms(flat, cfg, opts.seed);
        } catch (const MomentError&) {
            continue;
        }
        return flat;
    }
    return std::nullopt;
}

}  // namespace moments
