#include "derham/kernels.hpp"

#include <cmath>
#include <map>
#include <shared_mutex>
#include <stdexcept>

namespace derham {

namespace {
const double kPi = 3.14159265358979323846264338327950288;

double sphere_area_d(int n) {
  SpherePiece s = sphere_area_exact(n);
  return to_double(s.rational) * std::pow(kPi, s.pi_pow);
}
}  // namespace

SpherePiece sphere_area_exact(int n) {
  if (n < 2) throw std::invalid_argument("sphere_area_exact: n >= 2");
  // sigma_n = 2 pi^{n/2} / Gamma(n/2)
  if (n % 2 == 0) {
    int m = n / 2;
    Rational r = 2;
    for (int i = 2; i < m; ++i) r /= i;  // 1/(m-1)!
    return {r, m};
  }
  int m = (n - 1) / 2;
  // Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)
  Rational fourm = 1, mfact = 1, twomfact = 1;
  for (int i = 0; i < m; ++i) fourm *= 4;
  for (int i = 2; i <= m; ++i) mfact *= i;
  for (int i = 2; i <= 2 * m; ++i) twomfact *= i;
  return {Rational(2) * fourm * mfact / twomfact, m};
}

ScalarField fundamental_solution_field(int n) {
  if (n < 2) throw std::invalid_argument("fundamental_solution: n >= 2");
  if (n == 2) {
    Term t(Polynomial(2, Rational(1, 2)));
    t.log_pow = 1;
    t.pi_pow = -1;
    return ScalarField::symbolic(2, {t});
  }
  SpherePiece s = sphere_area_exact(n);
  Term t(Polynomial(n, Rational(1) / (s.rational * (2 - n))));
  t.rho_pow = 2 - n;
  t.pi_pow = -s.pi_pow;
  return ScalarField::symbolic(n, {t});
}

double fundamental_solution(int n, std::span<const double> x) {
  double r2 = 0;
  for (double v : x) r2 += v * v;
  if (r2 == 0) throw std::domain_error("fundamental_solution: singular at the origin");
  return fundamental_solution_field(n).eval(x);
}

KernelDoubleForm::KernelDoubleForm(int n, int x_degree, int y_degree)
    : n_(n), x_degree_(x_degree), y_degree_(y_degree) {}

void KernelDoubleForm::add_z(const MultiIndex& I, const MultiIndex& J, const ScalarField& f) {
  Entry& e = entries_[{I, J}];
  if (e.z_part.vars() == 0) e.z_part = ScalarField::zero(n_);
  e.z_part = e.z_part + f;
}

void KernelDoubleForm::add_separable(const MultiIndex& I, const MultiIndex& J,
                                     const ScalarField& fx, const ScalarField& fy) {
  Entry& e = entries_[{I, J}];
  if (e.z_part.vars() == 0) e.z_part = ScalarField::zero(n_);
  e.separable.emplace_back(fx, fy);
}

double KernelDoubleForm::eval_entry(const Entry& e, std::span<const double> x,
                                    std::span<const double> y) const {
  std::vector<double> z(n_);
  for (int i = 0; i < n_; ++i) z[i] = x[i] - y[i];
  double acc = e.z_part.eval(z);
  for (const auto& [fx, fy] : e.separable) acc += fx.eval(x) * fy.eval(y);
  return acc;
}

KernelDoubleForm KernelDoubleForm::y_exterior_derivative() const {
  KernelDoubleForm out(n_, x_degree_, y_degree_ + 1);
  for (const auto& [key, entry] : entries_) {
    const auto& [I, J] = key;
    for (int axis = 1; axis <= n_; ++axis) {
      if (J.contains(axis)) continue;
      auto [target, sign] = J.insert(axis);
      // d/dy_i acting on a function of z = x - y is -d/dz_i.
      if (!entry.z_part.symbolic_zero())
        out.add_z(I, target, entry.z_part.partial(axis) * Rational(-sign));
      for (const auto& [fx, fy] : entry.separable)
        out.add_separable(I, target, fx, fy.partial(axis) * Rational(sign));
    }
  }
  return out;
}

KernelDoubleForm KernelDoubleForm::x_exterior_derivative() const {
  KernelDoubleForm out(n_, x_degree_ + 1, y_degree_);
  for (const auto& [key, entry] : entries_) {
    const auto& [I, J] = key;
    for (int axis = 1; axis <= n_; ++axis) {
      if (I.contains(axis)) continue;
      auto [target, sign] = I.insert(axis);
      if (!entry.z_part.symbolic_zero())
        out.add_z(target, J, entry.z_part.partial(axis) * Rational(sign));
      for (const auto& [fx, fy] : entry.separable)
        out.add_separable(target, J, fx.partial(axis) * Rational(sign), fy);
    }
  }
  return out;
}

namespace {

KernelDoubleForm y_star(const KernelDoubleForm& k) {
  KernelDoubleForm out(k.ambient(), k.x_degree(), k.ambient() - k.y_degree());
  for (const auto& [key, entry] : k.entries()) {
    const auto& [I, J] = key;
    int sign = J.complement_sign();
    if (!entry.z_part.symbolic_zero()) out.add_z(I, J.complement(), entry.z_part * Rational(sign));
    for (const auto& [fx, fy] : entry.separable)
      out.add_separable(I, J.complement(), fx, fy * Rational(sign));
  }
  return out;
}

KernelDoubleForm x_star(const KernelDoubleForm& k) {
  KernelDoubleForm out(k.ambient(), k.ambient() - k.x_degree(), k.y_degree());
  for (const auto& [key, entry] : k.entries()) {
    const auto& [I, J] = key;
    int sign = I.complement_sign();
    if (!entry.z_part.symbolic_zero()) out.add_z(I.complement(), J, entry.z_part * Rational(sign));
    for (const auto& [fx, fy] : entry.separable)
      out.add_separable(I.complement(), J, fx * Rational(sign), fy);
  }
  return out;
}

}  // namespace

KernelDoubleForm KernelDoubleForm::y_codifferential() const {
  int s = codifferential_sign(n_, y_degree_);
  KernelDoubleForm out = y_star(y_star(*this).y_exterior_derivative());
  KernelDoubleForm scaled(n_, x_degree_, y_degree_ - 1);
  for (const auto& [key, entry] : out.entries()) {
    if (!entry.z_part.symbolic_zero())
      scaled.add_z(key.first, key.second, entry.z_part * Rational(s));
    for (const auto& [fx, fy] : entry.separable)
      scaled.add_separable(key.first, key.second, fx, fy * Rational(s));
  }
  return scaled;
}

KernelDoubleForm KernelDoubleForm::x_codifferential() const {
  int s = codifferential_sign(n_, x_degree_);
  KernelDoubleForm out = x_star(x_star(*this).x_exterior_derivative());
  KernelDoubleForm scaled(n_, x_degree_ - 1, y_degree_);
  for (const auto& [key, entry] : out.entries()) {
    if (!entry.z_part.symbolic_zero())
      scaled.add_z(key.first, key.second, entry.z_part * Rational(s));
    for (const auto& [fx, fy] : entry.separable)
      scaled.add_separable(key.first, key.second, fx * Rational(s), fy);
  }
  return scaled;
}

KernelDoubleForm KernelDoubleForm::operator+(const KernelDoubleForm& o) const {
  if (n_ != o.n_ || x_degree_ != o.x_degree_ || y_degree_ != o.y_degree_)
    throw std::invalid_argument("KernelDoubleForm +: shape mismatch");
  KernelDoubleForm out = *this;
  for (const auto& [key, entry] : o.entries_) {
    if (!entry.z_part.symbolic_zero()) out.add_z(key.first, key.second, entry.z_part);
    for (const auto& [fx, fy] : entry.separable) out.add_separable(key.first, key.second, fx, fy);
  }
  return out;
}

const KernelDoubleForm& kernel_e(int n, int q) {
  static std::map<std::pair<int, int>, KernelDoubleForm> cache;
  static std::shared_mutex mtx;
  const auto key = std::make_pair(n, q);
  {
    std::shared_lock lk(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  std::unique_lock lk(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (q < 0 || q > n) throw std::invalid_argument("kernel_e: degree out of range");

  KernelDoubleForm k(n, q, n - q);
  ScalarField e = fundamental_solution_field(n);
  for (const auto& I : MultiIndex::all(n, q))
    k.add_z(I, I.complement(), e * Rational(I.complement_sign()));
  return cache.emplace(key, std::move(k)).first->second;
}

const KernelDoubleForm& kernel_phi(int n, int q, PhiVariant variant) {
  static std::map<std::tuple<int, int, int>, KernelDoubleForm> cache;
  static std::shared_mutex mtx;
  const auto key = std::make_tuple(n, q, static_cast<int>(variant));
  {
    std::shared_lock lk(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  std::unique_lock lk(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const KernelDoubleForm& e_q = kernel_e(n, q);
  KernelDoubleForm k = variant == PhiVariant::phi ? e_q.y_codifferential()
                                                  : e_q.y_exterior_derivative();
  return cache.emplace(key, std::move(k)).first->second;
}

namespace {

/// Correction block of phi_{m,q}: the separable harmonic terms added on top
/// of phi_q. Kept separate so (Phi - Phi_m) can reuse it.
KernelDoubleForm correction_block(int n, int q, int m, PhiVariant variant) {
  int y_deg = variant == PhiVariant::phi ? n - q - 1 : n - q + 1;
  KernelDoubleForm corr(n, q, y_deg);
  SpherePiece sigma = sphere_area_exact(n);
  for (int k = 1; k <= m + 1; ++k) {
    const HarmonicBasis& basis = harmonic_basis(n, k);
    for (const auto& h : basis.members) {
      for (const auto& I : MultiIndex::all(n, q)) {
        // y-side: apply (d^{n-q-1})*_y or d^{n-q}_y to h(y) (star dy_I).
        Form hy(n, n - q);
        hy.set(I.complement(),
               ScalarField::from_polynomial(h.poly * Rational(I.complement_sign())));
        Form dy = variant == PhiVariant::phi ? codifferential(hy) : d(hy);
        // x-side: h(x) / ((n+2k-2) theta^{n+2k-2}(x)), with the raw-measure
        // normalization pair 1/(sigma_n g).
        Term tx(h.poly * (Rational(1) / (sigma.rational * h.norm_sq * (n + 2 * k - 2))));
        tx.theta_pow = n + 2 * k - 2;
        tx.pi_pow = -sigma.pi_pow;
        ScalarField fx = ScalarField::symbolic(n, {tx});
        for (const auto& [J, fy] : dy.coeffs()) corr.add_separable(I, J, fx, fy);
      }
    }
  }
  return corr;
}

}  // namespace

const KernelDoubleForm& truncated_kernel(int n, int q, int m, PhiVariant variant) {
  static std::map<std::tuple<int, int, int, int>, KernelDoubleForm> cache;
  static std::shared_mutex mtx;
  const auto key = std::make_tuple(n, q, m, static_cast<int>(variant));
  {
    std::shared_lock lk(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  std::unique_lock lk(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (m < 0) throw std::invalid_argument("truncated_kernel: m >= 0");

  KernelDoubleForm k = kernel_phi(n, q, variant) + correction_block(n, q, m, variant);
  return cache.emplace(key, std::move(k)).first->second;
}

double expansion_partial_sum(int n, int m_terms, std::span<const double> x,
                             std::span<const double> y) {
  double rx2 = 0, ry2 = 0, dot = 0;
  for (int i = 0; i < n; ++i) {
    rx2 += x[i] * x[i];
    ry2 += y[i] * y[i];
    dot += x[i] * y[i];
  }
  double rx = std::sqrt(rx2), ry = std::sqrt(ry2);
  if (!(rx > ry)) throw std::domain_error("expansion_partial_sum: requires |x| > |y|");
  double ex = fundamental_solution(n, x);
  if (ry == 0) return ex;
  double t = dot / (rx * ry);
  double ratio = ry / rx;
  double sigma = sphere_area_d(n);

  double sum = 0;
  if (n == 2) {
    // cos(k gamma) by Chebyshev recurrence; term_k = cos(k g) ratio^k/(2 pi k).
    double c0 = 1, c1 = t, rk = ratio;
    for (int k = 1; k <= m_terms; ++k) {
      double ck = k == 1 ? c1 : 2 * t * c1 - c0;
      if (k > 1) {
        c0 = c1;
        c1 = ck;
      }
      sum += ck * rk / (2 * kPi * k);
      rk *= ratio;
    }
  } else {
    // Gegenbauer C_k^nu, nu = (n-2)/2:
    // term_k = C_k^nu(t) ratio^k / ((n-2) sigma_n |x|^{n-2}).
    double nu = 0.5 * (n - 2);
    double g0 = 1, g1 = 2 * nu * t, rk = ratio;
    double scale = 1.0 / ((n - 2) * sigma * std::pow(rx, n - 2));
    for (int k = 1; k <= m_terms; ++k) {
      double gk;
      if (k == 1)
        gk = g1;
      else {
        gk = (2 * (k - 1 + nu) * t * g1 - (k - 2 + 2 * nu) * g0) / k;
        g0 = g1;
        g1 = gk;
      }
      sum += gk * rk * scale;
      rk *= ratio;
    }
  }
  return ex - sum;
}

double expansion_term_from_basis(int n, int k, std::span<const double> x,
                                 std::span<const double> y) {
  double rx2 = 0;
  for (int i = 0; i < n; ++i) rx2 += x[i] * x[i];
  const HarmonicBasis& basis = harmonic_basis(n, k);
  double sigma = sphere_area_d(n);
  double acc = 0;
  for (const auto& h : basis.members)
    acc += h.poly.eval(x) * h.poly.eval(y) / (to_double(h.norm_sq) * sigma);
  return acc / ((n + 2 * k - 2) * std::pow(std::sqrt(rx2), n + 2 * k - 2));
}

}  // namespace derham
