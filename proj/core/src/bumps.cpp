#include "derham/bumps.hpp"

#include <cmath>

namespace derham {

ScalarField gaussian_field(Polynomial poly, double alpha, std::vector<double> center) {
  const int n = poly.vars();
  ScalarField::Sampled s;
  s.value = [poly, alpha, center](std::span<const double> x) {
    double u = 0;
    for (std::size_t i = 0; i < center.size(); ++i) u += (x[i] - center[i]) * (x[i] - center[i]);
    return poly.eval(x) * std::exp(-alpha * u);
  };
  s.partial = [poly, alpha, center, n](int axis) {
    // d/dx_i [P e^{-a u}] = (dP - 2a (x_i - c_i) P) e^{-a u}
    Polynomial shift = Polynomial::variable(n, axis) - Polynomial(n, rat_from_double(center[axis - 1]));
    Polynomial p = poly.partial(axis) - shift * poly * rat_from_double(2 * alpha);
    return gaussian_field(std::move(p), alpha, center);
  };
  return ScalarField::sampled(n, std::move(s));
}

ScalarField compact_bump_field(Polynomial poly, int inv_pow, double radius,
                               std::vector<double> center) {
  const int n = poly.vars();
  ScalarField::Sampled s;
  s.value = [poly, inv_pow, radius, center](std::span<const double> x) {
    double u = 0;
    for (std::size_t i = 0; i < center.size(); ++i) u += (x[i] - center[i]) * (x[i] - center[i]);
    u /= radius * radius;
    if (u >= 1.0) return 0.0;
    double inv = 1.0 / (1.0 - u);
    return poly.eval(x) * std::pow(inv, inv_pow) * std::exp(-inv);
  };
  s.partial = [poly, inv_pow, radius, center, n](int axis) {
    // With s = (1-u)^{-1}: d/dx_i [P s^k e^{-s}] =
    //   (dP) s^k e^{-s} + 2(x_i-c_i)/rho^2 [ k P s^{k+1} - P s^{k+2} ] e^{-s}.
    Polynomial shift =
        Polynomial::variable(n, axis) - Polynomial(n, rat_from_double(center[axis - 1]));
    Rational inv_r2 = rat_from_double(2.0) / rat_from_double(radius * radius);
    ScalarField a = compact_bump_field(poly.partial(axis), inv_pow, radius, center);
    ScalarField b =
        compact_bump_field(shift * poly * (inv_r2 * inv_pow), inv_pow + 1, radius, center);
    ScalarField c = compact_bump_field(shift * poly * inv_r2, inv_pow + 2, radius, center);
    return a + b - c;
  };
  s.validity_radius = std::numeric_limits<double>::infinity();
  return ScalarField::sampled(n, std::move(s));
}

namespace {

Polynomial random_poly(int n, int max_degree, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> deg(0, max_degree);
  Polynomial p(n);
  int terms = 1 + static_cast<int>(rng() % 3);
  for (int t = 0; t < terms; ++t) {
    ExponentVec e(n, 0);
    int budget = deg(rng);
    for (int d = 0; d < budget; ++d) e[rng() % n] += 1;
    int c = coeff(rng);
    if (c != 0) p.add(e, c);
  }
  if (p.zero()) p.add(ExponentVec(n, 0), 1);
  return p;
}

std::vector<double> random_center(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-0.75, 0.75);
  std::vector<double> c(n);
  for (auto& v : c) v = pos(rng);
  return c;
}

}  // namespace

Form random_gaussian_form(int n, int q, std::mt19937_64& rng, double alpha) {
  Form u(n, q);
  for (const auto& idx : MultiIndex::all(n, q)) {
    if (rng() % 4 == 0 && q > 0) continue;  // keep some coefficients empty
    u.set(idx, gaussian_field(random_poly(n, 2, rng), alpha, random_center(n, rng)));
  }
  if (u.empty()) {
    auto idx = MultiIndex::all(n, q).front();
    u.set(idx, gaussian_field(random_poly(n, 2, rng), alpha, random_center(n, rng)));
  }
  return u;
}

Form random_polynomial_form(int n, int q, int max_degree, std::mt19937_64& rng) {
  Form u(n, q);
  for (const auto& idx : MultiIndex::all(n, q))
    u.set(idx, ScalarField::from_polynomial(random_poly(n, max_degree, rng)));
  return u;
}

std::pair<Form, Form> random_exact_pair(int n, int f_degree, std::mt19937_64& rng, double alpha) {
  Form u = random_gaussian_form(n, f_degree - 1, rng, alpha);
  return {u, d_analytic(u)};
}

std::pair<Form, Form> random_coexact_pair(int n, int g_degree, std::mt19937_64& rng, double alpha) {
  Form v = random_gaussian_form(n, g_degree + 1, rng, alpha);
  return {v, codifferential_analytic(v)};
}

Form random_compact_form(int n, int q, double radius, std::mt19937_64& rng) {
  Form u(n, q);
  for (const auto& idx : MultiIndex::all(n, q))
    u.set(idx, compact_bump_field(random_poly(n, 2, rng), 0, radius, random_center(n, rng)));
  return u;
}

}  // namespace derham
