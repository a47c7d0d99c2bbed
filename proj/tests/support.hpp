#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "moments/core.hpp"
#include "moments/matrix.hpp"

namespace moments::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline Vector random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
    Vector v(n);
    for (auto& x : v) x = scale * gaussian(rng);
    return v;
}

inline Matrix random_symmetric(Rng& rng, std::size_t n) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = gaussian(rng);
    return a;
}

// G G^T with G of size n x rank.
inline Matrix random_psd(Rng& rng, std::size_t n, std::size_t rank) {
    Matrix g(n, rank);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < rank; ++j) g(i, j) = gaussian(rng);
    return g * g.transpose();
}

inline AtomicMeasure random_measure(Rng& rng, int n, std::size_t atoms, double spread = 1.0) {
    AtomicMeasure mu;
    for (std::size_t i = 0; i < atoms; ++i)
        mu.add(random_vector(rng, static_cast<std::size_t>(n), spread), uniform(rng, 0.5, 2.0));
    return mu;
}

// Independent dense routines used as oracles.
inline Eigen::MatrixXd to_eigen(const Matrix& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
    return m;
}

inline Matrix from_eigen(const Eigen::MatrixXd& m) {
    Matrix a(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
    return a;
}

inline Eigen::VectorXd oracle_eigenvalues(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
    return es.eigenvalues();  // ascending
}

inline std::size_t oracle_rank(const Matrix& a, double rel = 1e-9) {
    const Eigen::VectorXd ev = oracle_eigenvalues(a);
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) > rel * scale * static_cast<double>(a.rows())) ++r;
    return r;
}

// Moments computed monomial by monomial with std::pow, independent of moments_of_measure.
inline double brute_moment(const AtomicMeasure& mu, const MultiIndex& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double m = mu.weights[i];
        for (std::size_t j = 0; j < a.exponents().size(); ++j) m *= std::pow(mu.atoms[i][j], a[j]);
        s += m;
    }
    return s;
}

}  // namespace moments::testing
