#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "moments/core.hpp"
#include "moments/matrix.hpp"

namespace moments {

struct SymEigen {
    Vector values;   // descending
    Matrix vectors;  // column i pairs with values[i]
};

// Cyclic Jacobi; deterministic for a given input. Throws InvalidInput on non-finite entries.
SymEigen sym_eigen(const Matrix& a);

enum class PsdClass { PositiveDefinite, PositiveSemidefiniteSingular, Indefinite };

struct PsdStatus {
    PsdClass kind = PsdClass::Indefinite;
    std::size_t rank = 0;
    double min_eig = 0.0;
    double max_abs_eig = 0.0;
    double rank_threshold = 0.0;
    double psd_threshold = 0.0;
};

PsdStatus psd_status(const Matrix& a, const ToleranceConfig& cfg);
const char* to_string(PsdClass k);

struct KernelBasis {
    std::vector<Vector> orthonormal;
    std::vector<Vector> echelon;  // reduced rows, pivot coefficient 1
    std::vector<std::size_t> pivots;
};

KernelBasis kernel_basis(const Matrix& a, const ToleranceConfig& cfg);

// Reduced row echelon form; pivot = earliest column holding a coefficient of magnitude >= 1e-6.
std::vector<Vector> echelonize(std::vector<Vector> rows, std::vector<std::size_t>* pivots = nullptr);

double frobenius(const Matrix& r, const Matrix& s);

struct SchurBlocks {
    Matrix top_left;      // N, or P for the inverse
    Matrix top_right;     // U, or V
    Matrix bottom_right;  // Delta, or epsilon
};

SchurBlocks schur_blocks(const Matrix& a, std::size_t split);
// Blocks of a^{-1}. Throws NumericalError when the equilibrated condition estimate exceeds 1/rank_tol,
// or when P disagrees with (N - U Delta^{-1} U^T)^{-1} for a 1x1 Delta.
SchurBlocks inverse_blocks(const Matrix& a, std::size_t split, const ToleranceConfig& cfg);

enum class PencilDomain { NonNegative, Real };

struct PencilResult {
    double t = 0.0;
    double min_eig = 0.0;
    bool feasible = false;
    bool unbounded = false;  // lambda_min still improving when the bracket cap was reached
};

PencilResult pencil_feasible(const Matrix& f, const Matrix& q, PencilDomain domain, const ToleranceConfig& cfg);

double min_eigenvalue(const Matrix& a);
double spectral_norm_sym(const Matrix& a);

// Lower-triangular factor when every pivot is positive.
std::optional<Matrix> cholesky(const Matrix& a);
Vector solve(const Matrix& a, const Vector& b);  // LU with partial pivoting
Matrix inverse(const Matrix& a);
Matrix pseudo_inverse_sym(const Matrix& a, const ToleranceConfig& cfg);

}  // namespace moments
