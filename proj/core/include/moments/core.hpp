#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "moments/matrix.hpp"

namespace moments {

class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exps);
    static MultiIndex zero(int n);
    static MultiIndex unit(int n, int i);

    int n() const { return static_cast<int>(e_.size()); }
    int degree() const;
    int operator[](std::size_t i) const { return e_[i]; }
    const std::vector<int>& exponents() const { return e_; }

    MultiIndex operator+(const MultiIndex& o) const;
    bool operator==(const MultiIndex& o) const = default;
    // Degree-lex: total degree first, then exponents descending (x1 before x2).
    std::strong_ordering operator<=>(const MultiIndex& o) const;

    std::string to_string() const;  // e.g. "x1^2*x2", "1"

private:
    std::vector<int> e_;
};

std::size_t binomial(std::size_t n, std::size_t k);
std::size_t basis_size(int n, int k);
std::vector<MultiIndex> monomial_basis(int n, int k);
std::size_t basis_index(const MultiIndex& a);
double monomial_value(const MultiIndex& a, const Vector& x);

class MomentSequence {
public:
    MomentSequence() = default;
    MomentSequence(int n, int k);  // all zeros
    MomentSequence(int n, int k, Vector values);

    int n() const { return n_; }
    int k() const { return k_; }
    std::size_t size() const { return values_.size(); }
    const Vector& values() const { return values_; }

    double operator[](const MultiIndex& a) const;
    double& operator[](const MultiIndex& a);
    double at(std::initializer_list<int> exps) const;
    double norm_inf() const;

    MomentSequence truncated(int k) const;

private:
    int n_ = 0;
    int k_ = 0;
    Vector values_;
};

class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int n) : n_(n) {}
    Polynomial(int n, std::initializer_list<std::pair<std::vector<int>, double>> terms);
    static Polynomial constant(int n, double c);
    static Polynomial monomial(const MultiIndex& a, double c = 1.0);
    static Polynomial from_vector(int n, int d, const Vector& coef);

    int n() const { return n_; }
    int degree() const;  // -1 for the zero polynomial
    bool is_zero() const { return coef_.empty(); }
    const std::map<MultiIndex, double>& terms() const { return coef_; }
    double coefficient(const MultiIndex& a) const;
    void set(const MultiIndex& a, double c);
    void add_term(const MultiIndex& a, double c);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double s) const;

    Vector hat(int d) const;  // coefficient vector in the degree-d basis
    std::string to_string() const;

private:
    int n_ = 0;
    std::map<MultiIndex, double> coef_;
};

struct MomentMatrix {
    int n = 0;
    int d = 0;
    std::vector<MultiIndex> labels;
    Matrix entries;

    std::size_t size() const { return labels.size(); }
};

struct AtomicMeasure {
    std::vector<Vector> atoms;
    Vector weights;

    int n() const { return atoms.empty() ? 0 : static_cast<int>(atoms.front().size()); }
    std::size_t size() const { return atoms.size(); }
    void add(Vector atom, double weight);
    void validate() const;  // throws InvalidInput on nonpositive weights or ragged atoms
};

// Relative coefficients; thresholds are derived from the data scale at each use.
struct ToleranceConfig {
    double psd_tol = 1e-9;
    double rank_tol = 1e-9;
    double moment_tol = 1e-8;
    double atom_merge_tol = 1e-8;

    void validate() const;
    double psd_threshold(std::size_t size, double max_abs_eig) const;
    double rank_threshold(std::size_t size, double max_abs_eig) const;
    double moment_threshold(const MomentSequence& y) const;
};

struct VerifyReport {
    double max_abs_deviation = 0.0;
    bool pass = false;
};

double riesz(const MomentSequence& y, const Polynomial& p);
MomentMatrix moment_matrix(const MomentSequence& y);
MomentMatrix moment_matrix(const MomentSequence& y, int d);  // requires 2d <= k
MomentSequence moments_of_measure(const AtomicMeasure& mu, int n, int k);
MomentSequence moments_of_measure(const AtomicMeasure& mu, int k);
VerifyReport verify_measure(const MomentSequence& y, const AtomicMeasure& mu,
                            const ToleranceConfig& cfg);
double eval_poly(const Polynomial& p, const Vector& x);

// Reads y_{a+b} off a labeled matrix; throws InvalidInput when equal label sums disagree.
MomentSequence sequence_from_matrix(const Matrix& m, int n, int d);

// Coalesces atoms closer than atom_merge_tol * (1 + |u|), summing weights.
AtomicMeasure merge_atoms(const AtomicMeasure& mu, const ToleranceConfig& cfg);

}  // namespace moments
