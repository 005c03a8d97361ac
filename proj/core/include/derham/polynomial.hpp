#pragma once

#include <map>
#include <span>
#include <vector>

#include "derham/rational.hpp"

namespace derham {

using ExponentVec = std::vector<int>;

/// Multivariate polynomial with exact rational coefficients, stored as a
/// sparse map from exponent vectors to coefficients. Zero coefficients are
/// never kept, so the zero polynomial is the empty map.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int n) : n_(n) {}
  Polynomial(int n, const Rational& constant);

  static Polynomial monomial(int n, const ExponentVec& exps, const Rational& c = 1);
  static Polynomial variable(int n, int axis);  // axis in 1..n
  static Polynomial radius_squared(int n);      // x1^2 + ... + xn^2

  int vars() const { return n_; }
  bool zero() const { return terms_.empty(); }
  int total_degree() const;
  bool homogeneous() const;
  const std::map<ExponentVec, Rational>& terms() const { return terms_; }

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Rational& c) const;
  bool operator==(const Polynomial& o) const = default;

  Polynomial partial(int axis) const;
  Polynomial laplacian() const;

  Rational eval(std::span<const Rational> x) const;
  double eval(std::span<const double> x) const;

  void set(const ExponentVec& exps, const Rational& c);
  void add(const ExponentVec& exps, const Rational& c);

  /// Divide by the content (gcd of numerators / lcm of denominators) so the
  /// coefficients are coprime integers; sign fixed by the leading term.
  Polynomial primitive_part() const;

 private:
  int n_ = 0;
  std::map<ExponentVec, Rational> terms_;
};

}  // namespace derham
