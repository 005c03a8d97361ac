#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace derham {

using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Exact conversion: every finite double is a dyadic rational.
inline Rational rat_from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("rat_from_double: non-finite value");
  return Rational(x);
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }

/// n!! with (-1)!! = 0!! = 1.
inline Rational double_factorial(long n) {
  Rational acc = 1;
  for (long v = n; v > 1; v -= 2) acc *= v;
  return acc;
}

inline std::string rat_str(const Rational& r) { return r.get_str(); }

}  // namespace derham
