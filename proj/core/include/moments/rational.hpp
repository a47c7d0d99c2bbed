#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace moments {

using Rational = boost::multiprecision::cpp_rational;
using RationalMatrix = std::vector<std::vector<Rational>>;

// Accepts integers, "p/q", and decimals with an optional exponent ("1.25", "-3e4"), all read exactly.
// Throws InvalidInput on anything else.
Rational parse_rational(std::string_view text);

// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);

double to_double(const Rational& r);

// Gauss-Jordan over the rationals. Throws PreconditionError when singular.
RationalMatrix rational_inverse(const RationalMatrix& a);

// Pivots of the symmetric LDL^T factorization in order; stops at the first nonpositive pivot.
std::vector<Rational> rational_ldl_pivots(const RationalMatrix& a);

}  // namespace moments
