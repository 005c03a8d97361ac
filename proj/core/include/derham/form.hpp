#pragma once

#include <map>

#include "derham/multi_index.hpp"
#include "derham/scalar_field.hpp"

namespace derham {

/// Exterior q-form on R^n: sparse map from increasing multi-indices to
/// coefficients. Absent index = zero coefficient. Degrees outside 0..n are
/// legal but always empty, so d and the codifferential are total.
class Form {
 public:
  Form() = default;
  Form(int n, int degree);

  int ambient() const { return n_; }
  int degree() const { return degree_; }
  const std::map<MultiIndex, ScalarField>& coeffs() const { return coeffs_; }

  bool empty() const { return coeffs_.empty(); }
  bool symbolic() const;

  void set(const MultiIndex& idx, ScalarField f);
  void add(const MultiIndex& idx, const ScalarField& f);
  const ScalarField* find(const MultiIndex& idx) const;
  ScalarField coeff(const MultiIndex& idx) const;  // zero field when absent

  Form operator+(const Form& o) const;
  Form operator-(const Form& o) const;
  Form operator*(const Rational& c) const;

  std::map<MultiIndex, double> eval(std::span<const double> x) const;

  bool symbolic_zero() const;
  bool far_field_zero() const;

  static Form zero_form(int n, int degree) { return Form(n, degree); }
  /// The constant volume form dx_1 ^ ... ^ dx_n.
  static Form volume(int n);

 private:
  int n_ = 0;
  int degree_ = 0;
  std::map<MultiIndex, ScalarField> coeffs_;
};

Form wedge(const Form& a, const Form& b);
Form hodge_star(const Form& a);

/// Exterior derivative, symbolic coefficients only. Sampled coefficients are
/// rejected with guidance to fd_d.
Form d(const Form& a);

/// Codifferential d* = s(n,q) * (star d star), the sign fixed by the L2
/// adjointness identity (dα, β) = (α, d*β).
Form codifferential(const Form& a);
int codifferential_sign(int n, int q);

/// Central-difference exterior derivative for sampled (or any) coefficients.
Form fd_d(const Form& a, double step);
Form fd_codifferential(const Form& a, double step);

/// Exterior derivative through the coefficients' analytic derivative hooks;
/// works for symbolic fields and for sampled fields built with partials.
Form d_analytic(const Form& a);
Form codifferential_analytic(const Form& a);

}  // namespace derham
