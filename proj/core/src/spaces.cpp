#include "derham/spaces.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace derham {

std::string WeightWindow::describe() const {
  switch (cls) {
    case WindowClass::NonPositive:
      return "non-positive weight (delta <= 0): outside the Fredholm range";
    case WindowClass::Isomorphism:
      return "isomorphism window (0 < delta < n-1): trivial cohomology";
    case WindowClass::BoundaryExcluded:
      return "excluded boundary (delta + 1 - n is a nonnegative integer)";
    case WindowClass::Injection:
      return "injection window (n-1+m < delta < n+m), m = " + std::to_string(m);
  }
  return "";
}

WeightWindow classify_delta(int n, double delta) {
  if (n < 2) throw std::invalid_argument("classify_delta: n >= 2");
  WeightWindow w;
  w.n = n;
  w.delta = delta;
  const double tol = 1e-9;
  if (delta <= tol) {
    w.cls = WindowClass::NonPositive;
    return w;
  }
  double x = delta + 1 - n;
  double nearest = std::round(x);
  if (nearest >= -tol && std::abs(x - nearest) < tol) {
    w.cls = WindowClass::BoundaryExcluded;
    return w;
  }
  if (delta < n - 1) {
    w.cls = WindowClass::Isomorphism;
    return w;
  }
  w.cls = WindowClass::Injection;
  w.m = static_cast<int>(std::floor(delta - n + 1));
  return w;
}

double weight(std::span<const double> x) {
  double r2 = 0;
  for (double v : x) r2 += v * v;
  return std::sqrt(1 + r2);
}

namespace {

std::vector<std::vector<double>> angular_stencil(int n, int level) {
  std::set<std::vector<double>> dirs;
  auto push = [&dirs](std::vector<double> v) {
    double norm = 0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
    for (double& c : v) c /= norm;
    dirs.insert(std::move(v));
  };
  if (n == 2) {
    int M = 16 << level;
    for (int i = 0; i < M; ++i)
      push({std::cos(2 * M_PI * i / M), std::sin(2 * M_PI * i / M)});
  } else {
    // signed axis / face-diagonal / body-diagonal stencil, then azimuthal
    // refinements per level (nested by construction: lower levels included).
    std::vector<std::vector<int>> pattern;
    for (int i = 0; i < n; ++i)
      for (int s : {-1, 1}) {
        std::vector<int> v(n, 0);
        v[i] = s;
        pattern.push_back(v);
      }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int si : {-1, 1})
          for (int sj : {-1, 1}) {
            std::vector<int> v(n, 0);
            v[i] = si;
            v[j] = sj;
            pattern.push_back(v);
          }
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> v(n);
      for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? 1 : -1;
      pattern.push_back(v);
    }
    for (const auto& p : pattern) push(std::vector<double>(p.begin(), p.end()));
    for (int l = 1; l <= level; ++l) {
      int M = 8 << l;
      for (int i = 0; i < M; ++i) {
        double phi = 2 * M_PI * i / M;
        for (double zc : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
          std::vector<double> v(n, 0.0);
          double s = std::sqrt(1 - zc * zc);
          v[0] = s * std::cos(phi);
          v[1] = s * std::sin(phi);
          v[n - 1] = zc;
          push(std::move(v));
        }
      }
    }
  }
  return {dirs.begin(), dirs.end()};
}

}  // namespace

SampleGrid SampleGrid::standard(int n, int level, double r_max) {
  SampleGrid g;
  g.level = level;
  std::set<std::vector<double>> pts;
  // lattice inside the unit ball, step halved per level; includes the origin
  double step = 0.5 / (1 << level);
  int span = static_cast<int>(1.0 / step);
  std::vector<int> idx(n, -span);
  for (;;) {
    std::vector<double> p(n);
    double r2 = 0;
    for (int i = 0; i < n; ++i) {
      p[i] = idx[i] * step;
      r2 += p[i] * p[i];
    }
    if (r2 <= 1.0 + 1e-12) pts.insert(p);
    int ax = 0;
    while (ax < n && ++idx[ax] > span) idx[ax++] = -span;
    if (ax == n) break;
  }
  // dyadic shells with the angular stencil
  auto dirs = angular_stencil(n, level);
  for (double r = 1; r <= r_max + 1e-9; r *= 2)
    for (const auto& dir : dirs) {
      std::vector<double> p(n);
      for (int i = 0; i < n; ++i) p[i] = r * dir[i];
      pts.insert(std::move(p));
    }
  // interleaved shells on refined levels keep nesting (pure additions)
  for (int l = 1; l <= level; ++l)
    for (double r = 1.5 * (1 << (l - 1)); r <= r_max; r *= 2)
      for (const auto& dir : dirs) {
        std::vector<double> p(n);
        for (int i = 0; i < n; ++i) p[i] = r * dir[i];
        pts.insert(std::move(p));
      }
  g.points.assign(pts.begin(), pts.end());
  g.descriptor = "standard(n=" + std::to_string(n) + ",level=" + std::to_string(level) +
                 ",rmax=" + std::to_string(r_max) + "," + std::to_string(g.points.size()) +
                 " pts)";
  return g;
}

namespace {

/// Derivative of a coefficient along an axis: exact when possible, central
/// finite difference otherwise.
ScalarField field_derivative(const ScalarField& f, int axis, double fd_step) {
  if (f.symbolic_rep() || f.sampled_data().partial) return f.partial(axis);
  const int n = f.vars();
  ScalarField::Sampled s;
  s.value = [f, axis, fd_step](std::span<const double> x) {
    std::vector<double> p(x.begin(), x.end());
    p[axis - 1] += fd_step;
    double hi = f.eval(p);
    p[axis - 1] -= 2 * fd_step;
    return (hi - f.eval(p)) / (2 * fd_step);
  };
  s.smoothness = std::max(0, f.smoothness() - 1);
  return ScalarField::sampled(n, std::move(s));
}

Form form_derivative(const Form& u, const ExponentVec& alpha, double fd_step) {
  Form out = u;
  for (std::size_t ax = 0; ax < alpha.size(); ++ax)
    for (int rep = 0; rep < alpha[ax]; ++rep) {
      Form next(out.ambient(), out.degree());
      for (const auto& [idx, c] : out.coeffs())
        next.set(idx, field_derivative(c, static_cast<int>(ax) + 1, fd_step));
      out = std::move(next);
    }
  return out;
}

std::vector<ExponentVec> multi_indices_up_to(int n, int max_total) {
  std::vector<ExponentVec> out;
  ExponentVec cur(n, 0);
  std::function<void(int, int)> rec = [&](int axis, int budget) {
    if (axis == n) {
      out.push_back(cur);
      return;
    }
    for (int a = 0; a <= budget; ++a) {
      cur[axis] = a;
      rec(axis + 1, budget - a);
    }
    cur[axis] = 0;
  };
  rec(0, max_total);
  return out;
}

int total(const ExponentVec& alpha) {
  int t = 0;
  for (int a : alpha) t += a;
  return t;
}

std::string alpha_label(const ExponentVec& alpha) {
  std::string s = "(";
  for (std::size_t i = 0; i < alpha.size(); ++i)
    s += (i ? "," : "") + std::to_string(alpha[i]);
  return s + ")";
}

double form_sup_weighted(const Form& u, double exponent, const SampleGrid& grid) {
  double m = 0;
  for (const auto& p : grid.points) {
    double w = std::pow(weight(p), exponent);
    EvalContext ctx(p);
    for (const auto& [idx, c] : u.coeffs()) m = std::max(m, w * std::abs(c.eval(ctx)));
  }
  return m;
}

}  // namespace

NormEstimate weighted_sup_norm(const Form& u, int s, double delta, const SampleGrid& grid,
                               double fd_step) {
  NormEstimate est;
  est.grid = grid.descriptor;
  for (const auto& alpha : multi_indices_up_to(u.ambient(), s)) {
    Form du = form_derivative(u, alpha, fd_step);
    double part = form_sup_weighted(du, delta + total(alpha), grid);
    est.components.push_back({"sup alpha=" + alpha_label(alpha), part});
    est.value += part;
  }
  return est;
}

NormEstimate holder_seminorm(const Form& u, double lambda, double delta, const SampleGrid& grid) {
  if (!(lambda > 0 && lambda <= 1)) throw std::invalid_argument("holder_seminorm: lambda in (0,1]");
  NormEstimate est;
  est.grid = grid.descriptor;
  // Precompute coefficient values and weights per point.
  std::vector<std::vector<double>> vals;
  std::vector<double> w;
  std::vector<const std::vector<double>*> pts;
  for (const auto& p : grid.points) {
    double r2 = 0;
    for (double v : p) r2 += v * v;
    if (r2 < 1.0 - 1e-12) continue;  // inside U
    EvalContext ctx(p);
    std::vector<double> row;
    for (const auto& [idx, c] : u.coeffs()) row.push_back(c.eval(ctx));
    vals.push_back(std::move(row));
    w.push_back(weight(p));
    pts.push_back(&p);
  }
  double best = 0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = 0; b < pts.size(); ++b) {
      if (a == b) continue;
      double d2 = 0, ra2 = 0;
      for (std::size_t i = 0; i < pts[a]->size(); ++i) {
        double dv = (*pts[a])[i] - (*pts[b])[i];
        d2 += dv * dv;
        ra2 += (*pts[a])[i] * (*pts[a])[i];
      }
      double dist = std::sqrt(d2);
      if (dist == 0 || dist > 0.5 * std::sqrt(ra2)) continue;
      double diff = 0;
      for (std::size_t i = 0; i < vals[a].size(); ++i)
        diff = std::max(diff, std::abs(vals[a][i] - vals[b][i]));
      double quot = std::pow(std::max(w[a], w[b]), delta + lambda) * diff / std::pow(dist, lambda);
      best = std::max(best, quot);
    }
  est.value = best;
  est.components.push_back({"holder pairs", best});
  return est;
}

TimeGrid TimeGrid::uniform(double T, int count) {
  TimeGrid g;
  for (int i = 0; i < count; ++i) g.times.push_back(T * i / (count - 1));
  return g;
}

TimeGrid TimeGrid::clustered(double T, int level) {
  std::set<double> ts;
  int count = 9 + 4 * level;
  for (int i = 0; i < count; ++i) ts.insert(T * i / (count - 1));
  for (int j = 1; j <= 3 + 2 * level; ++j) ts.insert(T * std::pow(4.0, -j));
  TimeGrid g;
  g.times.assign(ts.begin(), ts.end());
  return g;
}

TimeSampledForm TimeSampledForm::constant_in_time(const Form& f, const TimeGrid& grid) {
  TimeSampledForm u;
  u.grid = grid;
  u.slices.assign(grid.times.size(), f);
  return u;
}

namespace {

/// j-th time derivative of the slices by centered differences (one-sided at
/// the ends); assumes a reasonably uniform grid.
std::vector<Form> time_derivative(const TimeSampledForm& u, int j) {
  std::vector<Form> cur = u.slices;
  const auto& t = u.grid.times;
  for (int rep = 0; rep < j; ++rep) {
    std::vector<Form> next;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      std::size_t a = i == 0 ? 0 : i - 1;
      std::size_t b = i + 1 == cur.size() ? i : i + 1;
      double dt = t[b] - t[a];
      next.push_back((cur[b] - cur[a]) * rat_from_double(1.0 / dt));
    }
    cur = std::move(next);
  }
  return cur;
}

double slice_c0_norm(const Form& f, double delta, const SampleGrid& grid) {
  return form_sup_weighted(f, delta, grid);
}

}  // namespace

NormEstimate aniso_norm(const TimeSampledForm& u, int s, int k, double lambda, double mu,
                        double delta, const SampleGrid& grid, double fd_step) {
  if (u.slices.empty()) return {};
  if ((s >= 1 || mu > 0) && u.slices.size() < 8)
    throw std::invalid_argument("aniso_norm: need at least 8 time samples");
  const int n = u.ambient();
  NormEstimate est;
  est.grid = grid.descriptor;
  double sup_part = 0, holder_part = 0, time_part = 0;

  for (const auto& beta : multi_indices_up_to(n, k)) {
    for (const auto& alpha : multi_indices_up_to(n, 2 * s)) {
      for (int j = 0; 2 * j + total(alpha) <= 2 * s; ++j) {
        double shift = delta + total(alpha) + total(beta);
        // d_t^j d_x^{alpha+beta} u, slice-wise
        auto slices_j = time_derivative(u, j);
        ExponentVec ab(alpha);
        for (int i = 0; i < n; ++i) ab[i] += beta[i];
        std::vector<Form> derived;
        derived.reserve(slices_j.size());
        for (const auto& sl : slices_j) derived.push_back(form_derivative(sl, ab, fd_step));

        double sup_t = 0, hold_t = 0;
        for (const auto& sl : derived) {
          sup_t = std::max(sup_t, slice_c0_norm(sl, shift, grid));
          hold_t = std::max(hold_t, holder_seminorm(sl, lambda, shift, grid).value);
        }
        sup_part += sup_t;
        holder_part += hold_t;
        if (mu > 0) {
          double q = 0;
          for (std::size_t a = 0; a < derived.size(); ++a)
            for (std::size_t b = a + 1; b < derived.size(); ++b) {
              double dt = std::abs(u.grid.times[b] - u.grid.times[a]);
              if (dt == 0) continue;
              double diff = slice_c0_norm(derived[a] - derived[b], shift, grid);
              q = std::max(q, diff / std::pow(dt, mu));
            }
          time_part += q;
        }
      }
    }
  }
  est.components.push_back({"sup", sup_part});
  est.components.push_back({"space-holder", holder_part});
  est.components.push_back({"time-holder", time_part});
  est.value = sup_part + holder_part + time_part;
  return est;
}

NormEstimate gamma_norm(const TimeSampledForm& u, const TimeSampledForm& du,
                        const TimeSampledForm& dsu, int s, int k, double lambda, double mu,
                        double delta, const SampleGrid& grid) {
  NormEstimate a = aniso_norm(u, s, k, lambda, mu, delta, grid);
  NormEstimate b = aniso_norm(du, s, k, lambda, mu, delta + 1, grid);
  NormEstimate c = aniso_norm(dsu, s, k, lambda, mu, delta + 1, grid);
  NormEstimate est;
  est.grid = grid.descriptor;
  est.value = a.value + b.value + c.value;
  est.components.push_back({"u", a.value});
  est.components.push_back({"du", b.value});
  est.components.push_back({"d*u", c.value});
  return est;
}

TimeClassCheck time_class_check(const std::function<double(double)>& a, double T, double mu,
                                int levels) {
  TimeClassCheck out;
  if (mu <= 0) {
    out.accepted = true;
    return out;
  }
  for (int l = 0; l < levels; ++l) {
    TimeGrid g = TimeGrid::clustered(T, l);
    std::vector<double> av;
    for (double t : g.times) av.push_back(a(t));
    double q = 0;
    for (std::size_t i = 0; i < av.size(); ++i)
      for (std::size_t j = i + 1; j < av.size(); ++j) {
        double dt = g.times[j] - g.times[i];
        if (dt <= 0) continue;
        q = std::max(q, std::abs(av[i] - av[j]) / std::pow(dt, mu));
      }
    out.level_estimates.push_back(q);
  }
  out.accepted = true;
  for (std::size_t l = 1; l < out.level_estimates.size(); ++l)
    if (out.level_estimates[l] > 1.1 * out.level_estimates[l - 1] + 1e-12) out.accepted = false;
  return out;
}

}  // namespace derham
