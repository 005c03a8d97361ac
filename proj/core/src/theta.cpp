#include "derham/theta.hpp"

#include <cmath>

namespace derham {

namespace {
inline double bump(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }
inline double bump_d1(double t) { return t > 0 ? bump(t) / (t * t) : 0.0; }
inline double bump_d2(double t) { return t > 0 ? bump(t) * (1 - 2 * t) / (t * t * t * t) : 0.0; }
}  // namespace

double smooth_step(double t) {
  if (t <= 0) return 0;
  if (t >= 1) return 1;
  double b = bump(t), c = bump(1 - t);
  return b / (b + c);
}

double smooth_step_d1(double t) {
  if (t <= 0 || t >= 1) return 0;
  double b = bump(t), c = bump(1 - t);
  double bp = bump_d1(t), cp = -bump_d1(1 - t);
  double s = b + c;
  return (bp * c - b * cp) / (s * s);
}

double smooth_step_d2(double t) {
  if (t <= 0 || t >= 1) return 0;
  double b = bump(t), c = bump(1 - t);
  double bp = bump_d1(t), cp = -bump_d1(1 - t);
  double bpp = bump_d2(t), cpp = bump_d2(1 - t);
  double s = b + c;
  double D = bp * c - b * cp;
  double Dp = bpp * c - b * cpp;
  return (Dp * s - 2 * D * (bp + cp)) / (s * s * s);
}

// theta(r) = 2 + chi(r)(r - 2) with chi(r) = smooth_step(r - 1).
double theta_radial(double r) {
  if (r <= 1) return 2;
  if (r >= 2) return r;
  return 2 + smooth_step(r - 1) * (r - 2);
}

double theta_radial_d1(double r) {
  if (r <= 1) return 0;
  if (r >= 2) return 1;
  return smooth_step_d1(r - 1) * (r - 2) + smooth_step(r - 1);
}

double theta_radial_d2(double r) {
  if (r <= 1 || r >= 2) return 0;
  return smooth_step_d2(r - 1) * (r - 2) + 2 * smooth_step_d1(r - 1);
}

double theta(std::span<const double> x) {
  double r2 = 0;
  for (double v : x) r2 += v * v;
  return theta_radial(std::sqrt(r2));
}

}  // namespace derham
