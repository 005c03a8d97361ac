#pragma once

#include "derham/form.hpp"

namespace derham {

/// One orthogonal solid harmonic: an exact homogeneous polynomial p with
/// Delta p = 0, together with its squared sphere norm
/// g = int_{S^{n-1}} p^2 dS / sigma_n. The unit-norm member in that
/// convention is p / sqrt(g); products h(x) h(y) stay rational as
/// p(x) p(y) / g.
struct HarmonicPoly {
  Polynomial poly;
  int k = 0;
  int j = 0;
  Rational norm_sq = 1;

  double eval_normalized(std::span<const double> x) const;
};

struct HarmonicBasis {
  int n = 0, k = 0;
  std::vector<HarmonicPoly> members;
};

/// Dimension J(k) of homogeneous harmonics of degree k in n variables.
int harmonic_dim(int n, int k);

/// Normalized sphere moment: int_{S^{n-1}} x^alpha dS / sigma_n, exact.
Rational sphere_moment(int n, const ExponentVec& alpha);

/// Moment inner product of two polynomials (each monomial pair paired by
/// sphere_moment of the exponent sum).
Rational sphere_inner(const Polynomial& a, const Polynomial& b);

/// Orthogonal basis of degree-k harmonics via harmonic projection of the
/// monomials x^alpha (alpha_n <= 1, lexicographic) and exact Gram-Schmidt.
/// Cached per (n, k); safe for concurrent readers.
const HarmonicBasis& harmonic_basis(int n, int k);

/// Harmonic projection of a homogeneous polynomial: the unique harmonic h
/// with f = h + |x|^2 g.
Polynomial harmonic_projection(const Polynomial& f);

/// Basis of H_{<=m, Lambda^q}: forms h_k^{(j)} dx_I for k <= m, |I| = q,
/// with coefficients normalized in the moment convention (the scalar is
/// rationalized, so the coefficients stay exactly harmonic).
std::vector<Form> harmonic_qform_space(int n, int m, int q);

/// Exact identity check for the basis Gram matrix (off-diagonal inner
/// products vanish, diagonals equal the stored norms).
bool gram_is_identity(const HarmonicBasis& basis);

}  // namespace derham
