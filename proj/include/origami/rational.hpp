#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace origami {

using Integer = mpz_class;
using Rational = mpq_class;

inline Rational make_rational(const Integer& num, const Integer& den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational make_rational(long num, long den) {
  return make_rational(Integer(num), Integer(den));
}

/// Parses "p/q", "p" or a finite decimal such as "1.25" into an exact rational.
Rational parse_rational(const std::string& text);

std::string to_string(const Integer& z);
std::string to_string(const Rational& q);

Integer floor_of(const Rational& q);
Integer ceil_of(const Rational& q);

bool fits_int64(const Integer& z);
std::int64_t to_int64(const Integer& z);

/// Natural logarithm of a (possibly huge) positive integer.
double log_of(const Integer& z);

}  // namespace origami
