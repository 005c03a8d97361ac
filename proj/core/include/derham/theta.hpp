#pragma once

#include <span>

namespace derham {

// The smooth radial splice: theta(x) = |x| for |x| >= 2, theta(x) = 2 for
// |x| <= 1, glued on (1,2) with the standard exp(-1/t) step so that
// theta >= 1 everywhere and all derivatives match |x| at the outer edge.

double smooth_step(double t);     // 0 for t<=0, 1 for t>=1
double smooth_step_d1(double t);
double smooth_step_d2(double t);

double theta_radial(double r);
double theta_radial_d1(double r);
double theta_radial_d2(double r);

double theta(std::span<const double> x);

}  // namespace derham
