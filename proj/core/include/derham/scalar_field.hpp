#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "derham/polynomial.hpp"

namespace derham {

/// One product term of a symbolic coefficient:
///
///   poly(x) * |x|^rho_pow * theta(x)^(-theta_pow)
///           * prod_o (theta^(o)(|x|))^theta_derivs[o]
///           * (ln|x|)^log_pow * pi^pi_pow.
///
/// theta is the smooth radial splice (theta.hpp): theta = |x| on |x| >= 2,
/// theta = 2 near zero. The family is closed under honest differentiation;
/// a theta^(o) factor records the o-th derivative of the splice picked up
/// by the chain rule.
struct Term {
  Polynomial poly;
  int rho_pow = 0;
  int theta_pow = 0;                             // >= 0, power of 1/theta
  std::vector<std::pair<int, int>> theta_derivs; // (order >= 1, power >= 1), sorted
  int log_pow = 0;
  int pi_pow = 0;

  Term() = default;
  explicit Term(Polynomial p) : poly(std::move(p)) {}

  /// Fold positive even radial powers into the polynomial part.
  void normalize();
  bool same_key(const Term& o) const;
};

/// Point data shared by all term evaluations at one x.
struct EvalContext {
  std::vector<double> x;
  double r = 0, r2 = 0, log_r = 0;
  double theta = 0, theta_d1 = 0, theta_d2 = 0;

  explicit EvalContext(std::span<const double> point);
};

/// Coefficient of a differential form: either an exact symbolic sum of
/// Terms, or a sampled callable with an optional analytic-derivative hook.
class ScalarField {
 public:
  struct Sampled {
    std::function<double(std::span<const double>)> value;
    // Returns the analytic partial d/dx_axis as another field; empty when
    // only finite differences are available.
    std::function<ScalarField(int axis)> partial;
    double validity_radius = std::numeric_limits<double>::infinity();
    int smoothness = 1000;
  };

  ScalarField() = default;
  explicit ScalarField(int n) : n_(n) {}

  static ScalarField zero(int n) { return ScalarField(n); }
  static ScalarField constant(int n, const Rational& c);
  static ScalarField symbolic(int n, std::vector<Term> terms);
  static ScalarField from_polynomial(Polynomial p);
  static ScalarField sampled(int n, Sampled s);

  int vars() const { return n_; }
  bool symbolic_rep() const { return !sampled_.has_value(); }
  bool sampled_rep() const { return sampled_.has_value(); }
  const std::vector<Term>& terms() const;
  const Sampled& sampled_data() const;
  int smoothness() const;
  double validity_radius() const;

  bool symbolic_zero() const;  // formal-symbol zero; implies the function is zero
  /// Exact zero test on |x| >= 2, where theta = |x| and theta' = 1.
  bool far_field_zero() const;
  /// Terms with theta folded to |x| and derivative factors folded to 1/0;
  /// valid as functions on |x| >= 2 only.
  std::vector<Term> far_field_terms() const;

  ScalarField operator+(const ScalarField& o) const;
  ScalarField operator-(const ScalarField& o) const;
  ScalarField operator*(const ScalarField& o) const;
  ScalarField operator*(const Rational& c) const;
  ScalarField operator-() const;

  /// Honest partial derivative. Symbolic terms use exact chain rules
  /// (including the splice derivative factors); sampled fields defer to
  /// their analytic hook and throw without one.
  ScalarField partial(int axis) const;
  ScalarField laplacian() const;

  double eval(std::span<const double> x) const;
  double eval(const EvalContext& ctx) const;
  /// Exact evaluation at a rational point. Requires |x| rational whenever a
  /// radial factor is present, |x| outside the splice (<=1 or >=2) for theta
  /// factors, and no log/pi factors.
  Rational eval_exact(std::span<const Rational> x) const;

  struct CompiledTerm {
    double coeff;  // rational coefficient with pi^pi_pow folded in
    std::vector<std::pair<int, int>> exps;  // (var, power), sparse
    int rho_pow, theta_pow, log_pow;
    int d1 = 0, d2 = 0;  // powers of theta', theta''
  };
  const std::vector<CompiledTerm>& compiled() const { return compiled_; }

 private:
  void normalize_and_compile();

  int n_ = 0;
  std::vector<Term> terms_;
  std::optional<Sampled> sampled_;
  std::vector<CompiledTerm> compiled_;
};

}  // namespace derham
