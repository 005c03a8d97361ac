#pragma once

#include "derham/form.hpp"
#include "derham/harmonics.hpp"
#include "derham/theta.hpp"

namespace derham {

/// sigma_n as an exact rational multiple of a pi power.
struct SpherePiece {
  Rational rational;
  int pi_pow;
};
SpherePiece sphere_area_exact(int n);

/// Fundamental solution e of the Laplacian: e(x) = |x|^{2-n}/((2-n) sigma_n)
/// for n >= 3 and (1/(2 pi)) ln|x| for n = 2. The log coefficient is the one
/// that passes the distributional normalization check int e Lap(phi) = phi(0);
/// reports flag the alternative 1/pi convention.
ScalarField fundamental_solution_field(int n);
double fundamental_solution(int n, std::span<const double> x);

enum class PhiVariant { phi, phi_hat };

/// Double form sum_{I,J} kappa_{I,J}(x, y) dy_J (x) dx_I. Each entry splits
/// into a translation-invariant part in z = x - y and a list of separable
/// (x-factor, y-factor) corrections.
class KernelDoubleForm {
 public:
  struct Entry {
    ScalarField z_part;  // evaluated at z = x - y
    std::vector<std::pair<ScalarField, ScalarField>> separable;
  };
  using Key = std::pair<MultiIndex, MultiIndex>;  // (dx_I, dy_J)

  KernelDoubleForm(int n, int x_degree, int y_degree);

  int ambient() const { return n_; }
  int x_degree() const { return x_degree_; }
  int y_degree() const { return y_degree_; }
  const std::map<Key, Entry>& entries() const { return entries_; }

  void add_z(const MultiIndex& I, const MultiIndex& J, const ScalarField& f);
  void add_separable(const MultiIndex& I, const MultiIndex& J, const ScalarField& fx,
                     const ScalarField& fy);

  double eval_entry(const Entry& e, std::span<const double> x, std::span<const double> y) const;

  KernelDoubleForm y_exterior_derivative() const;
  KernelDoubleForm y_codifferential() const;
  KernelDoubleForm x_exterior_derivative() const;
  KernelDoubleForm x_codifferential() const;
  KernelDoubleForm operator+(const KernelDoubleForm& o) const;

 private:
  int n_, x_degree_, y_degree_;
  std::map<Key, Entry> entries_;
};

/// e_q(x,y) = sum_{|I|=q} e(x-y) (star dy_I) dx_I.
const KernelDoubleForm& kernel_e(int n, int q);

/// phi_q = (d^{n-q-1})*_y e_q and phi_hat_q = d_y^{n-q} e_q.
const KernelDoubleForm& kernel_phi(int n, int q, PhiVariant variant);

/// phi_{m,q} (resp. the hat variant): phi_q plus the harmonic corrections
///   h_k^{(j)}(x) (d*)_y(h_k^{(j)}(y) star dy_I) dx_I
///     / ((n+2k-2) theta^{n+2k-2}(x)),  k = 1..m+1,
/// with the raw-sphere-measure normalization of h (one 1/sigma_n per pair).
const KernelDoubleForm& truncated_kernel(int n, int q, int m, PhiVariant variant);

/// Partial sum e(x) - sum_{k<=m} sum_j h(x)h(y)/((n+2k-2)|x|^{n+2k-2}),
/// evaluated through the Gegenbauer/Chebyshev addition theorem. Requires
/// |x| > |y|.
double expansion_partial_sum(int n, int m_terms, std::span<const double> x,
                             std::span<const double> y);

/// Same degree-k term assembled from the explicit harmonic basis (exact
/// route, used to cross-check the addition theorem for small k).
double expansion_term_from_basis(int n, int k, std::span<const double> x,
                                 std::span<const double> y);

}  // namespace derham
