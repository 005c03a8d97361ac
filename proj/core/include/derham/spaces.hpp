#pragma once

#include <functional>
#include <string>

#include "derham/form.hpp"

namespace derham {

/// Classification of the weight index delta by the solvability windows:
/// isomorphism for 0 < delta < n-1, injection with an m-dimensional defect
/// pairing space for n-1+m < delta < n+m, excluded when delta+1-n is a
/// nonnegative integer.
enum class WindowClass { NonPositive, Isomorphism, BoundaryExcluded, Injection };

struct WeightWindow {
  int n = 0;
  double delta = 0;
  WindowClass cls = WindowClass::NonPositive;
  int m = -1;  // valid for Injection

  std::string describe() const;
};

WeightWindow classify_delta(int n, double delta);

/// w(x) = sqrt(1 + |x|^2).
double weight(std::span<const double> x);

/// Spatial sample grid: dyadic shells with fixed angular stencils plus a
/// dense lattice inside the unit ball. Levels are nested (refinement adds
/// points), so every grid-sup estimate is monotone in the level.
struct SampleGrid {
  std::vector<std::vector<double>> points;
  int level = 0;
  std::string descriptor;

  static SampleGrid standard(int n, int level = 0, double r_max = 64.0);
};

struct NormComponent {
  std::string label;
  double value = 0;
};

/// Lower bound of a supremum norm from grid sampling, with the per-term
/// breakdown retained.
struct NormEstimate {
  double value = 0;
  std::string grid;
  std::vector<NormComponent> components;
};

/// sum_{|alpha| <= s} sup_grid w^{delta+|alpha|} |d^alpha u|.
NormEstimate weighted_sup_norm(const Form& u, int s, double delta, const SampleGrid& grid,
                               double fd_step = 1e-3);

/// sup over admissible grid pairs (|x-y| <= |x|/2, both outside the unit
/// ball) of w^{delta+lambda}(x,y) |u(x)-u(y)| / |x-y|^lambda.
NormEstimate holder_seminorm(const Form& u, double lambda, double delta, const SampleGrid& grid);

struct TimeGrid {
  std::vector<double> times;
  static TimeGrid uniform(double T, int count);
  /// Uniform points plus a geometric cluster at t = 0 (refined per level).
  static TimeGrid clustered(double T, int level);
};

/// Form-valued samples on a time grid; all spatial operations act slice-wise
/// (time is a parameter throughout).
struct TimeSampledForm {
  TimeGrid grid;
  std::vector<Form> slices;

  int ambient() const { return slices.empty() ? 0 : slices.front().ambient(); }
  int degree() const { return slices.empty() ? 0 : slices.front().degree(); }
  static TimeSampledForm constant_in_time(const Form& f, const TimeGrid& grid);
};

/// Anisotropic norm with parabolic index bookkeeping:
///   sum_{|beta|<=k} sum_{|alpha|+2j<=2s}
///     [ sup_t ||d_t^j d^{alpha+beta} u||_{C0, delta+|alpha|+|beta|}
///       + space-Holder + (mu > 0 ? time-Holder quotient : 0) ].
NormEstimate aniso_norm(const TimeSampledForm& u, int s, int k, double lambda, double mu,
                        double delta, const SampleGrid& grid, double fd_step = 1e-3);

/// ||u|| + ||du|| + ||d*u|| with weights delta, delta+1, delta+1.
NormEstimate gamma_norm(const TimeSampledForm& u, const TimeSampledForm& du,
                        const TimeSampledForm& dsu, int s, int k, double lambda, double mu,
                        double delta, const SampleGrid& grid);

/// Refining-grid estimate of sup |a(t)-a(tau)|/|t-tau|^mu on [0,T]; accepted
/// when the estimates stabilize across levels (a growing sequence means the
/// declared time class is wrong).
struct TimeClassCheck {
  bool accepted = false;
  std::vector<double> level_estimates;
};

TimeClassCheck time_class_check(const std::function<double(double)>& a, double T, double mu,
                                int levels = 3);

}  // namespace derham
