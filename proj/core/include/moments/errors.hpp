#pragma once

#include <stdexcept>
#include <string>

namespace moments {

class MomentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (dimension mismatch, parse failure, y0 <= 0).
class InvalidInput : public MomentError {
public:
    using MomentError::MomentError;
};

// A documented precondition of the called operation does not hold.
class PreconditionError : public MomentError {
public:
    using MomentError::MomentError;
};

// A necessary condition for a representing measure fails; what() names it.
class NoMeasureError : public MomentError {
public:
    using MomentError::MomentError;
};

// Internal consistency failure, e.g. rank misestimation or failed extraction.
class NumericalError : public MomentError {
public:
    using MomentError::MomentError;
};

}  // namespace moments
