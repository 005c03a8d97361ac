#pragma once

#include <functional>
#include <span>
#include <vector>

#include "derham/form.hpp"

namespace derham {

/// Knobs for all numeric integration. Defaults make every identity in the
/// verification suites checkable in seconds at tolerance 1e-4.
struct QuadratureSpec {
  double truncation_radius = 12.0;  // R: integrate over |y| <= R (plus target offset)
  double singular_shell = 0.1;      // eps: first radial panel around the singular point
  int panels_per_axis = 8;          // box panels per axis for l2 pairings
  int gauss_order = 10;             // Gauss-Legendre nodes per panel / radial segment
  int radial_panels = 12;           // polar radial panels
  int angular_order = 36;           // polar angular resolution
  double tolerance = 1e-4;          // tau
  int workers = 2;

  void validate() const;
};

struct IntegralResult {
  double value = 0;
  double tail_estimate = 0;
};

/// Nodes/weights on [-1,1]; cached per order, safe for concurrent readers.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order);

/// Writes the weighted integrand values: out[k] += weight * g_k(y) is the
/// caller's job; the engine calls fn(y, weight, out) per node and reduces
/// chunk sums in a fixed order, so results do not depend on the worker count.
using WeightedIntegrand =
    std::function<void(std::span<const double> y, double weight, std::span<double> out)>;

/// Tensor Gauss panels over the cube [-R, R]^n.
std::vector<double> integrate_box(int n, int dim, const WeightedIntegrand& fn,
                                  const QuadratureSpec& spec);

/// Polar integration around `center` out to radius r_max; the r^{n-1}
/// Jacobian is part of the node weight, which is what makes |y-c|^{1-n}
/// kernels integrable without special handling.
std::vector<double> integrate_polar(int n, std::span<const double> center, double r_max, int dim,
                                    const WeightedIntegrand& fn, const QuadratureSpec& spec);

/// Estimated decay exponent p of max|values| ~ r^{-p} between two sample
/// shells; used for tail bounds and decay-precondition checks.
double fit_decay_exponent(double r1, double m1, double r2, double m2);

double sphere_area(int n);  // sigma_n

/// L2 pairing of two forms of equal degree over the truncated cube, with a
/// tail estimate from shell samples. Throws when the tail exceeds tau.
IntegralResult l2_inner_full(const Form& a, const Form& b, const QuadratureSpec& spec);
double l2_inner(const Form& a, const Form& b, const QuadratureSpec& spec);

}  // namespace derham
