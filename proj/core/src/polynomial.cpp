#include "derham/polynomial.hpp"

#include <numeric>
#include <stdexcept>

namespace derham {

namespace {
void check_dims(int a, int b) {
  if (a != b) throw std::invalid_argument("Polynomial: dimension mismatch");
}
}  // namespace

Polynomial::Polynomial(int n, const Rational& constant) : n_(n) {
  if (!is_zero(constant)) terms_[ExponentVec(n, 0)] = constant;
}

Polynomial Polynomial::monomial(int n, const ExponentVec& exps, const Rational& c) {
  if (static_cast<int>(exps.size()) != n) throw std::invalid_argument("monomial: bad exponent vector");
  Polynomial p(n);
  if (!is_zero(c)) p.terms_[exps] = c;
  return p;
}

Polynomial Polynomial::variable(int n, int axis) {
  if (axis < 1 || axis > n) throw std::invalid_argument("variable: axis out of range");
  ExponentVec e(n, 0);
  e[axis - 1] = 1;
  return monomial(n, e);
}

Polynomial Polynomial::radius_squared(int n) {
  Polynomial p(n);
  for (int i = 0; i < n; ++i) {
    ExponentVec e(n, 0);
    e[i] = 2;
    p.terms_[e] = 1;
  }
  return p;
}

int Polynomial::total_degree() const {
  int deg = -1;
  for (const auto& [e, c] : terms_) deg = std::max(deg, std::accumulate(e.begin(), e.end(), 0));
  return deg;
}

bool Polynomial::homogeneous() const {
  int deg = -1;
  for (const auto& [e, c] : terms_) {
    int d = std::accumulate(e.begin(), e.end(), 0);
    if (deg < 0) deg = d;
    if (d != deg) return false;
  }
  return true;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (zero()) {
    *this = o;
    return *this;
  }
  check_dims(n_, o.n_);
  for (const auto& [e, c] : o.terms_) add(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (zero() && n_ == 0) n_ = o.n_;
  check_dims(n_, o.n_);
  for (const auto& [e, c] : o.terms_) add(e, -c);
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  r -= o;
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check_dims(n_, o.n_);
  Polynomial r(n_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      ExponentVec e(n_);
      for (int i = 0; i < n_; ++i) e[i] = ea[i] + eb[i];
      r.add(e, ca * cb);
    }
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(n_);
  for (const auto& [e, c] : terms_) r.terms_[e] = -c;
  return r;
}

Polynomial Polynomial::operator*(const Rational& c) const {
  Polynomial r(n_);
  if (is_zero(c)) return r;
  for (const auto& [e, cc] : terms_) r.terms_[e] = cc * c;
  return r;
}

Polynomial Polynomial::partial(int axis) const {
  Polynomial r(n_);
  for (const auto& [e, c] : terms_) {
    int k = e[axis - 1];
    if (k == 0) continue;
    ExponentVec d = e;
    d[axis - 1] = k - 1;
    r.add(d, c * k);
  }
  return r;
}

Polynomial Polynomial::laplacian() const {
  Polynomial r(n_);
  for (int i = 1; i <= n_; ++i) r += partial(i).partial(i);
  return r;
}

Rational Polynomial::eval(std::span<const Rational> x) const {
  Rational acc = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    acc += t;
  }
  return acc;
}

double Polynomial::eval(std::span<const double> x) const {
  double acc = 0;
  for (const auto& [e, c] : terms_) {
    double t = to_double(c);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    acc += t;
  }
  return acc;
}

void Polynomial::set(const ExponentVec& exps, const Rational& c) {
  if (is_zero(c))
    terms_.erase(exps);
  else
    terms_[exps] = c;
}

void Polynomial::add(const ExponentVec& exps, const Rational& c) {
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    if (!is_zero(c)) terms_[exps] = c;
    return;
  }
  it->second += c;
  if (is_zero(it->second)) terms_.erase(it);
}

Polynomial Polynomial::primitive_part() const {
  if (zero()) return *this;
  mpz_class num_gcd = 0, den_lcm = 1;
  for (const auto& [e, c] : terms_) {
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num().get_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den().get_mpz_t());
  }
  Rational scale(den_lcm, num_gcd);
  scale.canonicalize();
  if (sgn(terms_.begin()->second) < 0) scale = -scale;
  if (sgn(scale) < 0) scale = -scale;
  Polynomial r = *this * scale;
  if (sgn(r.terms_.begin()->second) < 0) r = -r;
  return r;
}

}  // namespace derham
