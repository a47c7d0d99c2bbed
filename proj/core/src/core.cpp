#include "moments/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "moments/errors.hpp"

namespace moments {

MultiIndex::MultiIndex(std::vector<int> exps) : e_(std::move(exps)) {
    for (int x : e_)
        if (x < 0) throw InvalidInput("negative exponent in multi-index");
}

MultiIndex MultiIndex::zero(int n) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)); }

MultiIndex MultiIndex::unit(int n, int i) {
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    e[static_cast<std::size_t>(i)] = 1;
    return MultiIndex(std::move(e));
}

int MultiIndex::degree() const {
    int s = 0;
    for (int x : e_) s += x;
    return s;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
    if (o.n() != n()) throw InvalidInput("multi-index dimension mismatch");
    std::vector<int> e(e_);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += o.e_[i];
    return MultiIndex(std::move(e));
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& o) const {
    const int da = degree();
    const int db = o.degree();
    if (da != db) return da <=> db;
    return o.e_ <=> e_;
}

std::string MultiIndex::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < e_.size(); ++i) {
        if (e_[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += "x" + std::to_string(i + 1);
        if (e_[i] > 1) s += "^" + std::to_string(e_[i]);
    }
    return s.empty() ? "1" : s;
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::size_t basis_size(int n, int k) {
    return binomial(static_cast<std::size_t>(n + k), static_cast<std::size_t>(k));
}

namespace {

void fill_degree(int n, int remaining, std::vector<int>& cur, std::size_t pos,
                 std::vector<MultiIndex>& out) {
    if (pos + 1 == static_cast<std::size_t>(n)) {
        cur[pos] = remaining;
        out.emplace_back(cur);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        cur[pos] = e;
        fill_degree(n, remaining - e, cur, pos + 1, out);
    }
}

// Number of exponent vectors with p entries summing to m.
std::size_t compositions(int m, int p) {
    if (p == 0) return m == 0 ? 1 : 0;
    return binomial(static_cast<std::size_t>(m + p - 1), static_cast<std::size_t>(p - 1));
}

double ipow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

}  // namespace

std::vector<MultiIndex> monomial_basis(int n, int k) {
    if (n <= 0 || k < 0) throw InvalidInput("monomial_basis needs n > 0 and k >= 0");
    std::vector<MultiIndex> out;
    out.reserve(basis_size(n, k));
    std::vector<int> cur(static_cast<std::size_t>(n), 0);
    for (int d = 0; d <= k; ++d) fill_degree(n, d, cur, 0, out);
    return out;
}

std::size_t basis_index(const MultiIndex& a) {
    const int n = a.n();
    const int d = a.degree();
    std::size_t idx = d == 0 ? 0 : basis_size(n, d - 1);
    int rem = d;
    for (int i = 0; i + 1 < n; ++i) {
        for (int e = a[static_cast<std::size_t>(i)] + 1; e <= rem; ++e)
            idx += compositions(rem - e, n - i - 1);
        rem -= a[static_cast<std::size_t>(i)];
    }
    return idx;
}

double monomial_value(const MultiIndex& a, const Vector& x) {
    if (static_cast<std::size_t>(a.n()) != x.size()) throw InvalidInput("point dimension mismatch");
    double r = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) r *= ipow(x[i], a[i]);
    return r;
}

MomentSequence::MomentSequence(int n, int k) : n_(n), k_(k), values_(basis_size(n, k), 0.0) {
    if (n <= 0 || k < 0) throw InvalidInput("moment sequence needs n > 0 and k >= 0");
}

MomentSequence::MomentSequence(int n, int k, Vector values) : n_(n), k_(k), values_(std::move(values)) {
    if (n <= 0 || k < 0) throw InvalidInput("moment sequence needs n > 0 and k >= 0");
    if (values_.size() != basis_size(n, k))
        throw InvalidInput("moment sequence of degree " + std::to_string(k) + " in " +
                           std::to_string(n) + " variables needs " +
                           std::to_string(basis_size(n, k)) + " values");
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidInput("non-finite moment");
}

double MomentSequence::operator[](const MultiIndex& a) const {
    if (a.n() != n_ || a.degree() > k_) throw InvalidInput("moment index " + a.to_string() + " out of range");
    return values_[basis_index(a)];
}

double& MomentSequence::operator[](const MultiIndex& a) {
    if (a.n() != n_ || a.degree() > k_) throw InvalidInput("moment index " + a.to_string() + " out of range");
    return values_[basis_index(a)];
}

double MomentSequence::at(std::initializer_list<int> exps) const {
    return (*this)[MultiIndex(std::vector<int>(exps))];
}

double MomentSequence::norm_inf() const { return moments::norm_inf(values_); }

MomentSequence MomentSequence::truncated(int k) const {
    if (k > k_) throw InvalidInput("cannot truncate to a higher degree");
    return MomentSequence(n_, k, Vector(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(basis_size(n_, k))));
}

Polynomial::Polynomial(int n, std::initializer_list<std::pair<std::vector<int>, double>> terms) : n_(n) {
    for (const auto& [e, c] : terms) {
        if (static_cast<int>(e.size()) != n) throw InvalidInput("term dimension mismatch");
        add_term(MultiIndex(e), c);
    }
}

Polynomial Polynomial::constant(int n, double c) {
    Polynomial p(n);
    p.set(MultiIndex::zero(n), c);
    return p;
}

Polynomial Polynomial::monomial(const MultiIndex& a, double c) {
    Polynomial p(a.n());
    p.set(a, c);
    return p;
}

Polynomial Polynomial::from_vector(int n, int d, const Vector& coef) {
    const auto basis = monomial_basis(n, d);
    if (coef.size() != basis.size()) throw InvalidInput("coefficient vector length mismatch");
    Polynomial p(n);
    for (std::size_t i = 0; i < basis.size(); ++i) p.set(basis[i], coef[i]);
    return p;
}

int Polynomial::degree() const { return coef_.empty() ? -1 : coef_.rbegin()->first.degree(); }

double Polynomial::coefficient(const MultiIndex& a) const {
    auto it = coef_.find(a);
    return it == coef_.end() ? 0.0 : it->second;
}

void Polynomial::set(const MultiIndex& a, double c) {
    if (a.n() != n_) throw InvalidInput("term dimension mismatch");
    if (c == 0.0)
        coef_.erase(a);
    else
        coef_[a] = c;
}

void Polynomial::add_term(const MultiIndex& a, double c) { set(a, coefficient(a) + c); }

Polynomial Polynomial::operator+(const Polynomial& o) const {
    if (o.n_ != n_) throw InvalidInput("polynomial dimension mismatch");
    Polynomial r(*this);
    for (const auto& [a, c] : o.coef_) r.add_term(a, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (o.n_ != n_) throw InvalidInput("polynomial dimension mismatch");
    Polynomial r(n_);
    for (const auto& [a, c] : coef_)
        for (const auto& [b, e] : o.coef_) r.add_term(a + b, c * e);
    return r;
}

Polynomial Polynomial::operator*(double s) const {
    Polynomial r(n_);
    for (const auto& [a, c] : coef_) r.set(a, c * s);
    return r;
}

Vector Polynomial::hat(int d) const {
    if (degree() > d) throw InvalidInput("polynomial degree exceeds basis degree");
    Vector v(basis_size(n_, d), 0.0);
    for (const auto& [a, c] : coef_) v[basis_index(a)] = c;
    return v;
}

std::string Polynomial::to_string() const {
    if (coef_.empty()) return "0";
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    for (const auto& [a, c] : coef_) {
        const double mag = std::abs(c);
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        const bool unit = a.degree() > 0;
        if (!unit || std::abs(mag - 1.0) > 1e-12) {
            os << mag;
            if (unit) os << "*";
        }
        if (unit) os << a.to_string();
        first = false;
    }
    return os.str();
}

void AtomicMeasure::add(Vector atom, double weight) {
    atoms.push_back(std::move(atom));
    weights.push_back(weight);
}

void AtomicMeasure::validate() const {
    if (atoms.size() != weights.size()) throw InvalidInput("atom and weight counts differ");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!(weights[i] > 0.0)) throw InvalidInput("atom weight must be positive");
        if (atoms[i].size() != atoms.front().size()) throw InvalidInput("atoms of mixed dimension");
    }
}

void ToleranceConfig::validate() const {
    if (!(psd_tol > 0 && rank_tol > 0 && moment_tol > 0 && atom_merge_tol > 0))
        throw InvalidInput("tolerances must be strictly positive");
}

double ToleranceConfig::psd_threshold(std::size_t size, double max_abs_eig) const {
    return psd_tol * static_cast<double>(size) * std::max(max_abs_eig, 1.0);
}

double ToleranceConfig::rank_threshold(std::size_t size, double max_abs_eig) const {
    return rank_tol * static_cast<double>(size) * std::max(max_abs_eig, 1.0);
}

double ToleranceConfig::moment_threshold(const MomentSequence& y) const {
    return moment_tol * (1.0 + y.norm_inf());
}

double riesz(const MomentSequence& y, const Polynomial& p) {
    if (p.n() != y.n()) throw InvalidInput("riesz: dimension mismatch");
    if (p.degree() > y.k()) throw InvalidInput("riesz: polynomial degree exceeds moment degree");
    double s = 0.0;
    for (const auto& [a, c] : p.terms()) s += c * y[a];
    return s;
}

MomentMatrix moment_matrix(const MomentSequence& y, int d) {
    if (2 * d > y.k()) throw InvalidInput("moment matrix order exceeds half the moment degree");
    MomentMatrix m;
    m.n = y.n();
    m.d = d;
    m.labels = monomial_basis(y.n(), d);
    const std::size_t s = m.labels.size();
    m.entries = Matrix(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = i; j < s; ++j) {
            const double v = y[m.labels[i] + m.labels[j]];
            m.entries(i, j) = v;
            m.entries(j, i) = v;
        }
    return m;
}

MomentMatrix moment_matrix(const MomentSequence& y) {
    if (y.k() % 2 != 0) throw InvalidInput("moment matrix needs an even degree");
    return moment_matrix(y, y.k() / 2);
}

MomentSequence moments_of_measure(const AtomicMeasure& mu, int n, int k) {
    MomentSequence y(n, k);
    const auto basis = monomial_basis(n, k);
    Vector vals(basis.size(), 0.0);
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        if (static_cast<int>(mu.atoms[i].size()) != n) throw InvalidInput("atom dimension mismatch");
        for (std::size_t b = 0; b < basis.size(); ++b)
            vals[b] += mu.weights[i] * monomial_value(basis[b], mu.atoms[i]);
    }
    return MomentSequence(n, k, std::move(vals));
}

MomentSequence moments_of_measure(const AtomicMeasure& mu, int k) {
    if (mu.atoms.empty()) throw InvalidInput("empty measure has no dimension; pass n explicitly");
    return moments_of_measure(mu, mu.n(), k);
}

VerifyReport verify_measure(const MomentSequence& y, const AtomicMeasure& mu, const ToleranceConfig& cfg) {
    if (!mu.atoms.empty() && mu.n() != y.n()) throw InvalidInput("verify: dimension mismatch");
    const MomentSequence m = moments_of_measure(mu, y.n(), y.k());
    VerifyReport r;
    for (std::size_t i = 0; i < y.size(); ++i)
        r.max_abs_deviation = std::max(r.max_abs_deviation, std::abs(y.values()[i] - m.values()[i]));
    r.pass = r.max_abs_deviation <= cfg.moment_threshold(y);
    return r;
}

double eval_poly(const Polynomial& p, const Vector& x) {
    if (static_cast<std::size_t>(p.n()) != x.size()) throw InvalidInput("eval: dimension mismatch");
    double s = 0.0;
    for (const auto& [a, c] : p.terms()) s += c * monomial_value(a, x);
    return s;
}

MomentSequence sequence_from_matrix(const Matrix& m, int n, int d) {
    const auto labels = monomial_basis(n, d);
    if (m.rows() != labels.size() || m.cols() != labels.size())
        throw InvalidInput("matrix size does not match the degree-" + std::to_string(d) + " basis");
    MomentSequence y(n, 2 * d);
    std::vector<bool> seen(y.size(), false);
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = 0; j < labels.size(); ++j) {
            const MultiIndex a = labels[i] + labels[j];
            const std::size_t idx = basis_index(a);
            if (seen[idx]) {
                if (y[a] != m(i, j))
                    throw InvalidInput("matrix is not Hankel-consistent at label " + a.to_string());
            } else {
                y[a] = m(i, j);
                seen[idx] = true;
            }
        }
    return y;
}

AtomicMeasure merge_atoms(const AtomicMeasure& mu, const ToleranceConfig& cfg) {
    AtomicMeasure out;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
        const Vector& u = mu.atoms[i];
        bool merged = false;
        for (std::size_t j = 0; j < out.atoms.size(); ++j) {
            const double tol = cfg.atom_merge_tol * (1.0 + std::max(norm2(u), norm2(out.atoms[j])));
            if (norm2(sub(u, out.atoms[j])) <= tol) {
                const double w = out.weights[j] + mu.weights[i];
                for (std::size_t c = 0; c < u.size(); ++c)
                    out.atoms[j][c] = (out.weights[j] * out.atoms[j][c] + mu.weights[i] * u[c]) / w;
                out.weights[j] = w;
                merged = true;
                break;
            }
        }
        if (!merged) out.add(u, mu.weights[i]);
    }
    return out;
}

}  // namespace moments
