#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bcpg {

using Rational = mpq_class;
using BigInt = mpz_class;
using RationalVector = std::vector<Rational>;

/// Closest continued-fraction convergent p/q of x with |x - p/q| <= tol.
/// Angles given as decimal multiples of pi (e.g. -3pi/4 stored as a double)
/// are recovered exactly when divided by pi first.
Rational rationalize(double x, double tol = 1e-12);

/// Exact rational value of a finite double.
Rational exact(double x);

/// phi / pi rationalized at the library-wide angle precision.
Rational angle_over_pi(double radians);

bool is_integer(const Rational& q);

/// Converts to int64, throwing if the value is not an integer or overflows.
std::int64_t to_int64(const Rational& q);
std::int64_t to_int64(const BigInt& z);

std::string to_string(const Rational& q);

}  // namespace bcpg
