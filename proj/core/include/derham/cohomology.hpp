#pragma once

#include "derham/potentials.hpp"
#include "derham/spaces.hpp"

namespace derham {

struct CocycleReport {
  int degree = 0;
  bool symbolic_path = false;
  bool closed_exact = false;
  double residual = 0;

  bool ok(double threshold) const {
    return symbolic_path ? closed_exact : residual <= threshold;
  }
};

/// Exact symbolic df = 0 whenever the coefficients allow it; otherwise the
/// finite-difference residual on the standard residual grid.
CocycleReport cocycle_check(const Form& f, double fd_step = 0.05);
CocycleReport cococycle_check(const Form& g, double fd_step = 0.05);

struct SolvabilityReport {
  int n = 0, q = 0, m = 0;
  bool preconditions_ok = true;
  std::string message;
  std::vector<std::pair<MomentKey, double>> pairings;  // (k, j, I) -> value
  std::vector<double> per_time_max;                    // anisotropic mode
  double max_abs = 0;
  double threshold = 0;
  bool satisfied = false;
};

/// Orthogonality test against H_{<=m+1, Lambda^q}:
/// (f, d h)_{L2} + (g, d* h)_{L2} for every basis form h; the verdict is
/// max |pairing| <= 10 tau.
SolvabilityReport solvability_check(const Form& f, const Form& g, int m, double declared_delta,
                                    const QuadratureSpec& spec);

/// Slice-wise version for time-parameterized data (t is a parameter).
SolvabilityReport solvability_check(const TimeSampledForm& f, const TimeSampledForm& g, int m,
                                    double declared_delta, const QuadratureSpec& spec);

/// The class map d(Phi - Phi_m): moment extraction, the explicit
/// representative, then d. The declared delta must classify into the
/// matching injection window (or the isomorphism window, where the
/// projection of every admissible cocycle vanishes up to quadrature error).
Form class_projection(const Form& f, int m, double declared_delta, const QuadratureSpec& spec);

struct CohomologyBasis {
  int n = 0, q = 0, m = 0;
  WeightWindow window;
  std::vector<MomentKey> labels;  // (k, j, I) per member
  std::vector<Form> members;      // d( h_k^{(j)} dx_I / ((n+2k-2) theta^{n+2k-2}) )
  int rank = 0;
  int upper_bound = 0;
};

/// Explicit generators of the image of d(Phi - Phi_m) in degree q_out, with
/// the exact rank of their span (coefficients compared as rational functions
/// on |x| >= 2).
CohomologyBasis representative_basis(int n, int q_out, int m);

/// Primitive of one generator: h_k^{(j)} dx_I / ((n+2k-2) theta^{n+2k-2}).
Form representative_primitive(int n, int k, int j, const MultiIndex& I);

/// Exact rank of a family of symbolic forms on |x| >= 2.
int far_field_rank(const std::vector<Form>& forms);

/// Exact membership of `candidate` in the far-field span of `family`.
bool in_far_field_span(const std::vector<Form>& family, const Form& candidate);

enum class TimeClassTag { c_s_0, c_s_half_lambda };

struct AnisoRepresentative {
  CohomologyBasis base;
  TimeGrid grid;
  TimeClassTag time_class = TimeClassTag::c_s_0;
  double lambda = 0.5;
  std::vector<std::vector<double>> a_values;  // [generator][time]
  std::vector<Form> slices;                   // Sum_g a_g(t) member_g, exact per slice

  TimeSampledForm time_form() const;
};

/// Time-parameterized representatives sum a_I(t) h dx_I / (...), slices exact
/// combinations of the isotropic generators. For the C^{s,lambda/2} class the
/// coefficients must pass the refining-grid time-quotient estimator.
AnisoRepresentative aniso_representative_basis(
    int n, int q_out, int m, const std::vector<std::function<double(double)>>& a_fns, double T,
    TimeClassTag time_class, double lambda = 0.5, int time_points = 9);

struct ConsistencyReport {
  double table_gap = 0;       // max entrywise gap between the two moment tables
  double projection_gap = 0;  // max coefficient gap between the two projections
};

/// Representative independence of the class map: projections of g and g + du
/// agree (du a coboundary of decaying u).
ConsistencyReport class_map_consistency(const Form& g, const Form& u, int m,
                                        double declared_delta, const QuadratureSpec& spec);

/// Max far-field coefficient gap between two symbolic forms (atom-wise).
double projection_coefficient_gap(const Form& a, const Form& b);

}  // namespace derham
