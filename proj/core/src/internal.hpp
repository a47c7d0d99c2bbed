#pragma once

#include <optional>
#include <sstream>
#include <string>

#include "moments/core.hpp"

namespace moments::detail {

// Moments read off a moment matrix, averaging the entries that share a label sum.
MomentSequence averaged_moments(const MomentMatrix& m);

// Least-squares weights on fixed atoms from the moments of degree <= k. Empty when the fit fails.
std::optional<AtomicMeasure> fit_weights(const MomentSequence& y, const std::vector<Vector>& atoms,
                                         const ToleranceConfig& cfg);

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace moments::detail
