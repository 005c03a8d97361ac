#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "derham/kernels.hpp"
#include "derham/quadrature.hpp"

namespace derham {

struct KernelChoice {
  PhiVariant variant = PhiVariant::phi;
  std::optional<int> m;  // engaged: use the truncated kernel phi_{m,q}

  static KernelChoice phi() { return {PhiVariant::phi, std::nullopt}; }
  static KernelChoice phi_hat() { return {PhiVariant::phi_hat, std::nullopt}; }
  static KernelChoice phi_m(int m) { return {PhiVariant::phi, m}; }
  static KernelChoice phi_hat_m(int m) { return {PhiVariant::phi_hat, m}; }
};

struct DecayCheck {
  double fitted_exponent = 0;
  double required = 0;
  bool accepted = false;
};

/// Empirical decay fit of max|f| against log w on sample shells; the declared
/// delta is accepted when the fitted exponent reaches delta + 1 - 0.25.
DecayCheck verify_decay(const Form& f, double declared_delta, const QuadratureSpec& spec);

/// One-pass evaluator of (integral f ^ kappa(x, .)) for a fixed kernel;
/// evaluations are memoized per target point, so finite-difference stencils
/// over the resulting form reuse quadrature passes.
class PotentialEvaluator {
 public:
  PotentialEvaluator(Form f, KernelDoubleForm kernel, QuadratureSpec spec);

  int ambient() const { return n_; }
  int out_degree() const;
  std::map<MultiIndex, double> eval(std::span<const double> x) const;

  double tail_estimate(std::span<const double> x) const;
  double singular_patch_estimate(std::span<const double> x) const;

 private:
  std::vector<double> raw_integrate(std::span<const double> x, std::span<const double> center,
                                    double r_max, const QuadratureSpec& spec) const;

  int n_;
  Form f_;
  KernelDoubleForm kernel_;
  QuadratureSpec spec_;
  std::vector<MultiIndex> out_indices_;
  struct Piece {
    int out_slot;
    int sign;
    MultiIndex L;  // f-component wedged against dy_J
    const KernelDoubleForm::Entry* entry;
  };
  std::vector<Piece> pieces_;
  mutable std::map<std::vector<double>, std::map<MultiIndex, double>> memo_;
  mutable std::mutex memo_mtx_;
};

struct PotentialResult {
  std::vector<std::map<MultiIndex, double>> values;  // one per requested point
  double tail_estimate = 0;
  double singular_patch_estimate = 0;
  QuadratureSpec spec;
};

/// Potential of f against phi / phi_hat / their truncations, evaluated at the
/// given points. Verifies the declared decay first.
PotentialResult potential(const Form& f, KernelChoice choice,
                          const std::vector<std::vector<double>>& x_points,
                          double declared_delta, const QuadratureSpec& spec);

/// The same operator as a lazily evaluated Form (sampled coefficients over a
/// shared memoized evaluator).
Form potential_form(const Form& f, KernelChoice choice, double declared_delta,
                    const QuadratureSpec& spec);
Form evaluator_form(std::shared_ptr<const PotentialEvaluator> ev);

/// Deterministic point set used by the residual norms.
std::vector<std::vector<double>> residual_grid(int n);

double grid_norm(const Form& a, const std::vector<std::vector<double>>& grid);
double grid_norm_diff(const Form& a, const Form& b, const std::vector<std::vector<double>>& grid);

struct ResidualReport {
  bool preconditions_ok = true;
  std::string message;
  double d_phi_residual = 0;        // ||d Phi f - f||
  double dstar_phi_residual = 0;    // ||d* Phi f||
  double dstar_phihat_residual = 0; // ||d* PhiHat g - g||
  double d_phihat_residual = 0;     // ||d PhiHat g||
};

/// Residual check of the four distributional identities of the potentials:
/// d(Phi f) = f, d*(Phi f) = 0, d*(PhiHat g) = g, d(PhiHat g) = 0.
ResidualReport lemma_check(const Form& f, const Form& g, double declared_delta,
                           const QuadratureSpec& spec, double fd_step = 0.05);

/// u = Phi f + PhiHat g, as a lazy form.
Form solve_system(const Form& f, const Form& g, double declared_delta,
                  const QuadratureSpec& spec);

struct HodgeParts {
  Form exact_part;    // w = d Phi u
  Form coexact_part;  // v = d* PhiHat u
  double residual = 0;          // ||u - v - w||
  double dstar_v_residual = 0;  // ||d* v||
  double dv_du_residual = 0;    // ||d v - d u||
};

/// Decomposition u = d* PhiHat u + d Phi u; requires declared delta > n/2.
HodgeParts hodge_decompose(const Form& u, double declared_delta, const QuadratureSpec& spec,
                           double fd_step = 0.05);

struct MomentKey {
  int k = 0, j = 0;
  MultiIndex I;
  auto operator<=>(const MomentKey&) const = default;
};

struct MomentTable {
  int n = 0, q = 0, m = 0;
  std::map<MomentKey, double> entries;
  double tail_estimate = 0;
  double max_abs() const;
};

/// c_{k,j,I} = int f(y) ^ (d^{n-q-1})*_y (h_k^{(j)}(y) (star dy_I)),
/// k = 1..m+1; smooth integrands, no singularity. q is one less than the
/// degree of f.
MomentTable moment_functional(const Form& f, int m, double declared_delta,
                              const QuadratureSpec& spec);

/// sum c_{k,j,I} h_k^{(j)}(x) dx_I / ((n+2k-2) theta^{n+2k-2}(x)) -- the
/// printed correction sum.
Form representative_from_moments(const MomentTable& table, int n, int q);

/// (Phi - Phi_m) f from its moment table: the printed sum scaled by
/// -1/sigma_n, which is the factor that makes d of it reproduce the class of
/// f (checked by the two-pass moment oracle).
Form scaled_representative(const MomentTable& table, int n, int q);

}  // namespace derham
