#pragma once

#include <utility>
#include <vector>

#include "moments/core.hpp"
#include "moments/matrix.hpp"

namespace moments {

struct RankOneDecomposition {
    std::vector<Vector> vectors;
    double common_value = 0.0;  // (Q • X) / r
    double residual = 0.0;      // |X - sum u u^T|_F
};

// X = sum u_i u_i^T with u_i^T Q u_i equal for all i. Throws NoMeasureError if X is indefinite.
RankOneDecomposition sz_decompose(const Matrix& x, const Matrix& q, const ToleranceConfig& cfg);

// One balancing step: returns (w1, w2) with w1^T Q w1 = delta and w1 w1^T + w2 w2^T = ui ui^T + uj uj^T.
// Requires ui^T Q ui and uj^T Q uj on opposite sides of delta.
std::pair<Vector, Vector> balance_pair(const Vector& ui, const Vector& uj, const Matrix& q, double delta);

double quad_form(const Matrix& q, const Vector& u);

}  // namespace moments
