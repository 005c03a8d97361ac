#include "derham/form.hpp"

#include <stdexcept>

namespace derham {

Form::Form(int n, int degree) : n_(n), degree_(degree) {
  if (n < 1) throw std::invalid_argument("Form: dimension must be positive");
}

bool Form::symbolic() const {
  for (const auto& [i, f] : coeffs_)
    if (!f.symbolic_rep()) return false;
  return true;
}

void Form::set(const MultiIndex& idx, ScalarField f) {
  if (idx.degree() != degree_ || idx.ambient() != n_)
    throw std::invalid_argument("Form::set: index does not match form degree/dimension");
  if (f.symbolic_rep() && f.symbolic_zero())
    coeffs_.erase(idx);
  else
    coeffs_[idx] = std::move(f);
}

void Form::add(const MultiIndex& idx, const ScalarField& f) {
  auto it = coeffs_.find(idx);
  if (it == coeffs_.end())
    set(idx, f);
  else
    set(idx, it->second + f);
}

const ScalarField* Form::find(const MultiIndex& idx) const {
  auto it = coeffs_.find(idx);
  return it == coeffs_.end() ? nullptr : &it->second;
}

ScalarField Form::coeff(const MultiIndex& idx) const {
  auto it = coeffs_.find(idx);
  return it == coeffs_.end() ? ScalarField::zero(n_) : it->second;
}

Form Form::operator+(const Form& o) const {
  if (n_ != o.n_ || degree_ != o.degree_) throw std::invalid_argument("Form +: shape mismatch");
  Form r = *this;
  for (const auto& [i, f] : o.coeffs_) r.add(i, f);
  return r;
}

Form Form::operator-(const Form& o) const { return *this + o * Rational(-1); }

Form Form::operator*(const Rational& c) const {
  Form r(n_, degree_);
  if (is_zero(c)) return r;
  for (const auto& [i, f] : coeffs_) r.set(i, f * c);
  return r;
}

std::map<MultiIndex, double> Form::eval(std::span<const double> x) const {
  std::map<MultiIndex, double> out;
  EvalContext ctx(x);
  for (const auto& [i, f] : coeffs_) out[i] = f.eval(ctx);
  return out;
}

bool Form::symbolic_zero() const {
  for (const auto& [i, f] : coeffs_)
    if (!f.symbolic_zero()) return false;
  return true;
}

bool Form::far_field_zero() const {
  for (const auto& [i, f] : coeffs_)
    if (!f.far_field_zero()) return false;
  return true;
}

Form Form::volume(int n) {
  Form v(n, n);
  std::vector<int> full(n);
  for (int i = 0; i < n; ++i) full[i] = i + 1;
  v.set(MultiIndex(full, n), ScalarField::constant(n, 1));
  return v;
}

Form wedge(const Form& a, const Form& b) {
  if (a.ambient() != b.ambient()) throw std::invalid_argument("wedge: dimension mismatch");
  Form r(a.ambient(), a.degree() + b.degree());
  if (r.degree() > a.ambient()) return r;
  for (const auto& [ia, fa] : a.coeffs())
    for (const auto& [ib, fb] : b.coeffs()) {
      auto [merged, sign] = ia.merge(ib);
      if (sign == 0) continue;
      r.add(merged, fa * fb * Rational(sign));
    }
  return r;
}

Form hodge_star(const Form& a) {
  Form r(a.ambient(), a.ambient() - a.degree());
  for (const auto& [i, f] : a.coeffs()) {
    int sign = i.complement_sign();
    r.add(i.complement(), f * Rational(sign));
  }
  return r;
}

Form d(const Form& a) {
  const int n = a.ambient();
  Form r(n, a.degree() + 1);
  if (a.degree() >= n) return r;
  for (const auto& [idx, f] : a.coeffs()) {
    if (!f.symbolic_rep())
      throw std::domain_error("d: sampled coefficient; use fd_d for numeric data");
    for (int axis = 1; axis <= n; ++axis) {
      if (idx.contains(axis)) continue;
      auto [target, sign] = idx.insert(axis);
      r.add(target, f.partial(axis) * Rational(sign));
    }
  }
  return r;
}

int codifferential_sign(int n, int q) {
  // From integration by parts: (d alpha, beta) = (-1)^q int alpha ^ d star beta
  // and star(star) = (-1)^{p(n-p)} on p-forms with p = n-q+1.
  int e = q + (n - q + 1) * (q - 1);
  return (e % 2 == 0) ? 1 : -1;
}

Form codifferential(const Form& a) {
  const int n = a.ambient();
  Form r(n, a.degree() - 1);
  if (a.degree() <= 0) return r;
  Form sds = hodge_star(d(hodge_star(a)));
  return r + sds * Rational(codifferential_sign(n, a.degree()));
}

namespace {

template <typename Partial>
Form exterior_derivative_with(const Form& a, Partial&& part) {
  const int n = a.ambient();
  Form r(n, a.degree() + 1);
  if (a.degree() >= n) return r;
  for (const auto& [idx, f] : a.coeffs())
    for (int axis = 1; axis <= n; ++axis) {
      if (idx.contains(axis)) continue;
      auto [target, sign] = idx.insert(axis);
      r.add(target, part(f, axis) * Rational(sign));
    }
  return r;
}

}  // namespace

Form fd_d(const Form& a, double step) {
  if (step <= 0) throw std::invalid_argument("fd_d: step must be positive");
  return exterior_derivative_with(a, [step](const ScalarField& f, int axis) {
    ScalarField::Sampled s;
    int n = f.vars();
    s.value = [f, axis, step, n](std::span<const double> x) {
      std::vector<double> p(x.begin(), x.end());
      p[axis - 1] += step;
      double hi = f.eval(p);
      p[axis - 1] -= 2 * step;
      double lo = f.eval(p);
      return (hi - lo) / (2 * step);
    };
    s.validity_radius = f.validity_radius() - step;
    s.smoothness = std::max(0, f.smoothness() - 1);
    return ScalarField::sampled(n, std::move(s));
  });
}

Form fd_codifferential(const Form& a, double step) {
  const int n = a.ambient();
  Form r(n, a.degree() - 1);
  if (a.degree() <= 0) return r;
  Form sds = hodge_star(fd_d(hodge_star(a), step));
  return r + sds * Rational(codifferential_sign(n, a.degree()));
}

Form d_analytic(const Form& a) {
  return exterior_derivative_with(a, [](const ScalarField& f, int axis) { return f.partial(axis); });
}

Form codifferential_analytic(const Form& a) {
  const int n = a.ambient();
  Form r(n, a.degree() - 1);
  if (a.degree() <= 0) return r;
  Form sds = hodge_star(d_analytic(hodge_star(a)));
  return r + sds * Rational(codifferential_sign(n, a.degree()));
}

}  // namespace derham
