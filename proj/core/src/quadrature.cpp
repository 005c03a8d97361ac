#include "derham/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <thread>

namespace derham {

namespace {
const double kPi = 3.14159265358979323846264338327950288;
}

void QuadratureSpec::validate() const {
  if (!(truncation_radius > 2)) throw std::invalid_argument("QuadratureSpec: R must exceed 2");
  if (!(singular_shell > 0 && singular_shell < truncation_radius))
    throw std::invalid_argument("QuadratureSpec: need 0 < eps < R");
  if (!(tolerance > 0)) throw std::invalid_argument("QuadratureSpec: tau must be positive");
  if (panels_per_axis < 1 || gauss_order < 2 || radial_panels < 2 || angular_order < 4)
    throw std::invalid_argument("QuadratureSpec: degenerate resolution");
}

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::shared_mutex mtx;
  {
    std::shared_lock lk(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
  }
  std::unique_lock lk(mtx);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  std::vector<double> x(order), w(order);
  for (int i = 0; i < order; ++i) {
    // Newton from the Chebyshev-like initial guess.
    double t = std::cos(kPi * (i + 0.75) / (order + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = t;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = order * (t * p1 - p0) / (t * t - 1);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1, p1 = t;
    for (int k = 2; k <= order; ++k) {
      double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = order * (t * p1 - p0) / (t * t - 1);
    x[i] = t;
    w[i] = 2 / ((1 - t * t) * dp * dp);
  }
  return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

namespace {

/// Run fn(chunk) for chunk = 0..count-1 on `workers` threads; partial sums
/// land in per-chunk slots and are added in chunk order afterwards, so the
/// result is independent of scheduling.
void run_chunks(int count, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || count <= 1) {
    for (int c = 0; c < count; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex err_mtx;
  for (int t = 0; t < std::min(workers, count); ++t)
    pool.emplace_back([&] {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= count) return;
        try {
          fn(c);
        } catch (...) {
          std::scoped_lock lk(err_mtx);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

void accumulate(std::span<double> into, std::span<const double> from) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}

}  // namespace

std::vector<double> integrate_box(int n, int dim, const WeightedIntegrand& fn,
                                  const QuadratureSpec& spec) {
  spec.validate();
  const auto& [gx, gw] = gauss_legendre(spec.gauss_order);
  const double R = spec.truncation_radius;
  const int P = spec.panels_per_axis;
  const double h = 2 * R / P;
  const int G = spec.gauss_order;
  const int nodes_per_axis = P * G;

  // Chunk over the first axis' panels.
  std::vector<std::vector<double>> partial(P, std::vector<double>(dim, 0.0));
  run_chunks(P, spec.workers, [&](int chunk) {
    std::vector<double> y(n);
    std::vector<int> counter(n, 0);
    std::span<double> out(partial[chunk]);
    // first-axis nodes restricted to this panel
    for (int g0 = 0; g0 < G; ++g0) {
      double a0 = -R + chunk * h;
      y[0] = a0 + 0.5 * h * (gx[g0] + 1);
      double w0 = 0.5 * h * gw[g0];
      // remaining axes: full tensor loop
      std::fill(counter.begin(), counter.end(), 0);
      const long total = n == 1 ? 1 : static_cast<long>(std::pow((double)nodes_per_axis, n - 1));
      for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        double w = w0;
        for (int ax = 1; ax < n; ++ax) {
          int node = rem % nodes_per_axis;
          rem /= nodes_per_axis;
          int panel = node / G, g = node % G;
          double a = -R + panel * h;
          y[ax] = a + 0.5 * h * (gx[g] + 1);
          w *= 0.5 * h * gw[g];
        }
        fn(y, w, out);
      }
    }
  });

  std::vector<double> result(dim, 0.0);
  for (const auto& p : partial) accumulate(result, p);
  return result;
}

std::vector<double> integrate_polar(int n, std::span<const double> center, double r_max, int dim,
                                    const WeightedIntegrand& fn, const QuadratureSpec& spec) {
  spec.validate();
  if (n != 2 && n != 3)
    throw std::domain_error("integrate_polar: implemented for dimensions 2 and 3");
  const auto& [gx, gw] = gauss_legendre(spec.gauss_order);

  // Radial panels: [0, eps], then geometric growth to r_max.
  std::vector<double> edges{0.0, std::min(spec.singular_shell, r_max / 2)};
  const int P = spec.radial_panels;
  double growth = std::pow(r_max / edges[1], 1.0 / (P - 1));
  for (int k = 1; k < P; ++k) edges.push_back(edges[1] * std::pow(growth, k));
  edges.back() = r_max;

  // Angular nodes.
  struct Dir {
    double w;
    std::array<double, 3> omega;
  };
  std::vector<Dir> dirs;
  if (n == 2) {
    const int M = 2 * spec.angular_order;
    dirs.reserve(M);
    for (int m = 0; m < M; ++m) {
      double phi = 2 * kPi * m / M;
      dirs.push_back({2 * kPi / M, {std::cos(phi), std::sin(phi), 0}});
    }
  } else {
    const int K = spec.angular_order / 2;
    const int M = spec.angular_order;
    const auto& [ux, uw] = gauss_legendre(K);
    dirs.reserve(K * M);
    for (int k = 0; k < K; ++k) {
      double u = ux[k], su = std::sqrt(std::max(0.0, 1 - u * u));
      for (int m = 0; m < M; ++m) {
        double phi = 2 * kPi * m / M;
        dirs.push_back({uw[k] * 2 * kPi / M, {su * std::cos(phi), su * std::sin(phi), u}});
      }
    }
  }

  std::vector<std::vector<double>> partial(P, std::vector<double>(dim, 0.0));
  run_chunks(P, spec.workers, [&](int panel) {
    std::vector<double> y(n);
    std::span<double> out(partial[panel]);
    double a = edges[panel], b = edges[panel + 1];
    for (int g = 0; g < spec.gauss_order; ++g) {
      double r = a + 0.5 * (b - a) * (gx[g] + 1);
      double wr = 0.5 * (b - a) * gw[g] * std::pow(r, n - 1);
      for (const auto& dir : dirs) {
        for (int i = 0; i < n; ++i) y[i] = center[i] + r * dir.omega[i];
        fn(y, wr * dir.w, out);
      }
    }
  });

  std::vector<double> result(dim, 0.0);
  for (const auto& p : partial) accumulate(result, p);
  return result;
}

double fit_decay_exponent(double r1, double m1, double r2, double m2) {
  const double floor_v = 1e-300;
  m1 = std::max(m1, floor_v);
  m2 = std::max(m2, floor_v);
  return -(std::log(m2) - std::log(m1)) / (std::log(r2) - std::log(r1));
}

double sphere_area(int n) {
  // sigma_n = 2 pi^{n/2} / Gamma(n/2)
  return 2 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

namespace {

/// Fixed direction set for shell sampling (deterministic).
std::vector<std::vector<double>> shell_directions(int n) {
  std::vector<std::vector<double>> dirs;
  for (int i = 0; i < n; ++i)
    for (int s : {-1, 1}) {
      std::vector<double> e(n, 0.0);
      e[i] = s;
      dirs.push_back(e);
    }
  std::vector<double> diag(n, 1.0 / std::sqrt(double(n)));
  dirs.push_back(diag);
  for (int i = 1; i < n; ++i) {
    auto v = diag;
    v[i] = -v[i];
    dirs.push_back(v);
  }
  return dirs;
}

}  // namespace

IntegralResult l2_inner_full(const Form& a, const Form& b, const QuadratureSpec& spec) {
  if (a.ambient() != b.ambient() || a.degree() != b.degree())
    throw std::invalid_argument("l2_inner: forms must share dimension and degree");
  const int n = a.ambient();

  auto dot = [&a, &b](std::span<const double> y) {
    double acc = 0;
    EvalContext ctx(y);
    for (const auto& [idx, fa] : a.coeffs()) {
      const ScalarField* fb = b.find(idx);
      if (fb) acc += fa.eval(ctx) * fb->eval(ctx);
    }
    return acc;
  };

  auto value = integrate_box(
      n, 1, [&dot](std::span<const double> y, double w, std::span<double> out) { out[0] += w * dot(y); },
      spec);

  // Tail: sample on two interior shells, fit the decay, bound the remainder
  // of the radial integral beyond R.
  const double R = spec.truncation_radius;
  double m1 = 0, m2 = 0;
  const double r1 = 0.7 * R, r2 = 0.95 * R;
  for (const auto& dir : shell_directions(n)) {
    std::vector<double> p1(n), p2(n);
    for (int i = 0; i < n; ++i) {
      p1[i] = r1 * dir[i];
      p2[i] = r2 * dir[i];
    }
    m1 = std::max(m1, std::abs(dot(p1)));
    m2 = std::max(m2, std::abs(dot(p2)));
  }
  IntegralResult res;
  res.value = value[0];
  if (m2 <= 1e-290) {
    res.tail_estimate = 0;
  } else {
    double p = fit_decay_exponent(r1, m1, r2, m2);
    if (p <= n + 0.5)
      res.tail_estimate = std::numeric_limits<double>::infinity();
    else
      res.tail_estimate = m2 * std::pow(R / r2, -p) * sphere_area(n) * std::pow(R, n) / (p - n);
  }
  return res;
}

double l2_inner(const Form& a, const Form& b, const QuadratureSpec& spec) {
  IntegralResult r = l2_inner_full(a, b, spec);
  if (!(r.tail_estimate <= spec.tolerance))
    throw std::runtime_error("l2_inner: tail estimate exceeds tolerance; integrand decays too slowly");
  return r.value;
}

}  // namespace derham
