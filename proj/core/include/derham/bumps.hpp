#pragma once

#include <random>

#include "derham/form.hpp"

namespace derham {

/// Smooth rapidly-decaying test fields with exact derivative hooks, closed
/// under differentiation: P(x) exp(-a|x-c|^2) and the compactly supported
/// P(x) (1-u)^{-k} exp(-1/(1-u)), u = |x-c|^2/rho^2.

ScalarField gaussian_field(Polynomial poly, double alpha, std::vector<double> center);
ScalarField compact_bump_field(Polynomial poly, int inv_pow, double radius,
                               std::vector<double> center);

/// q-form with random small-degree polynomial x Gaussian coefficients.
Form random_gaussian_form(int n, int q, std::mt19937_64& rng, double alpha = 1.0);

/// Random polynomial q-form (exact coefficients), degree <= max_degree.
Form random_polynomial_form(int n, int q, int max_degree, std::mt19937_64& rng);

/// Exact cocycle f = du for a random Gaussian (q-1)-form u; returns {u, f}.
std::pair<Form, Form> random_exact_pair(int n, int f_degree, std::mt19937_64& rng,
                                        double alpha = 1.0);

/// Exact co-cocycle g = d*v for a random Gaussian (q+1)-form v; {v, g}.
std::pair<Form, Form> random_coexact_pair(int n, int g_degree, std::mt19937_64& rng,
                                          double alpha = 1.0);

/// Compactly supported bump q-form (all coefficients vanish for |x-c|>=radius).
Form random_compact_form(int n, int q, double radius, std::mt19937_64& rng);

}  // namespace derham
