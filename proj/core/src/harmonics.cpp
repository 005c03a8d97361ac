#include "derham/harmonics.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <shared_mutex>
#include <stdexcept>

#include "derham/rational_linalg.hpp"

namespace derham {

double HarmonicPoly::eval_normalized(std::span<const double> x) const {
  return poly.eval(x) / std::sqrt(to_double(norm_sq));
}

int harmonic_dim(int n, int k) {
  if (n < 2 || k < 0) throw std::invalid_argument("harmonic_dim: need n >= 2, k >= 0");
  auto binom = [](long a, long b) -> long {
    if (b < 0 || b > a) return 0;
    long r = 1;
    for (long i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
    return r;
  };
  if (k == 0) return 1;
  return static_cast<int>(binom(n + k - 1, n - 1) - binom(n + k - 3, n - 1));
}

Rational sphere_moment(int n, const ExponentVec& alpha) {
  long total = 0;
  for (int a : alpha) {
    if (a < 0) throw std::invalid_argument("sphere_moment: negative exponent");
    if (a % 2 != 0) return 0;
    total += a;
  }
  Rational num = 1;
  for (int a : alpha) num *= double_factorial(a - 1);
  Rational den = 1;
  for (long j = 0; j < total / 2; ++j) den *= (n + 2 * j);
  return num / den;
}

Rational sphere_inner(const Polynomial& a, const Polynomial& b) {
  if (a.vars() != b.vars()) throw std::invalid_argument("sphere_inner: dimension mismatch");
  const int n = a.vars();
  Rational acc = 0;
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) {
      ExponentVec e(n);
      for (int i = 0; i < n; ++i) e[i] = ea[i] + eb[i];
      acc += ca * cb * sphere_moment(n, e);
    }
  return acc;
}

namespace {

/// Monomial basis of homogeneous degree-k polynomials, lexicographic.
std::vector<ExponentVec> homogeneous_monomials(int n, int k) {
  std::vector<ExponentVec> out;
  ExponentVec cur(n, 0);
  std::function<void(int, int)> rec = [&](int axis, int remaining) {
    if (axis == n - 1) {
      cur[axis] = remaining;
      out.push_back(cur);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      cur[axis] = a;
      rec(axis + 1, remaining - a);
    }
  };
  rec(0, k);
  return out;
}

}  // namespace

Polynomial harmonic_projection(const Polynomial& f) {
  if (f.zero()) return f;
  if (!f.homogeneous()) throw std::invalid_argument("harmonic_projection: not homogeneous");
  const int n = f.vars();
  const int k = f.total_degree();
  if (k < 2) return f;
  // Solve Delta(|x|^2 g) = Delta f for g in P_{k-2}; then h = f - |x|^2 g.
  auto basis = homogeneous_monomials(n, k - 2);
  std::map<ExponentVec, int> pos;
  for (std::size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = static_cast<int>(i);
  const int dim = static_cast<int>(basis.size());
  Polynomial r2 = Polynomial::radius_squared(n);
  RatMatrix A(dim, std::vector<Rational>(dim, 0));
  for (int c = 0; c < dim; ++c) {
    Polynomial img = (r2 * Polynomial::monomial(n, basis[c])).laplacian();
    for (const auto& [e, v] : img.terms()) A[pos.at(e)][c] = v;
  }
  std::vector<Rational> rhs(dim, 0);
  for (const auto& [e, v] : f.laplacian().terms()) rhs[pos.at(e)] = v;
  std::vector<Rational> g = solve_square(std::move(A), std::move(rhs));
  Polynomial gp(n);
  for (int c = 0; c < dim; ++c)
    if (!is_zero(g[c])) gp.add(basis[c], g[c]);
  return f - r2 * gp;
}

const HarmonicBasis& harmonic_basis(int n, int k) {
  static std::map<std::pair<int, int>, HarmonicBasis> cache;
  static std::shared_mutex mtx;
  const auto key = std::make_pair(n, k);
  {
    std::shared_lock lk(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  std::unique_lock lk(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  HarmonicBasis basis;
  basis.n = n;
  basis.k = k;
  // Monomials with alpha_n <= 1 project onto a spanning set of exactly
  // J(k) independent harmonics (Cauchy data x_n = 0).
  std::vector<Polynomial> candidates;
  for (const auto& e : homogeneous_monomials(n, k))
    if (e[n - 1] <= 1) candidates.push_back(harmonic_projection(Polynomial::monomial(n, e)));

  std::vector<Polynomial> ortho;
  std::vector<Rational> norms;
  for (auto& c : candidates) {
    Polynomial v = c;
    for (std::size_t j = 0; j < ortho.size(); ++j) {
      Rational proj = sphere_inner(v, ortho[j]) / norms[j];
      if (!is_zero(proj)) v -= ortho[j] * proj;
    }
    Rational nsq = sphere_inner(v, v);
    if (is_zero(nsq)) continue;  // dependent candidate
    v = v.primitive_part();
    nsq = sphere_inner(v, v);
    ortho.push_back(std::move(v));
    norms.push_back(std::move(nsq));
  }
  if (static_cast<int>(ortho.size()) != harmonic_dim(n, k))
    throw std::logic_error("harmonic_basis: spanning set rank mismatch");
  for (std::size_t j = 0; j < ortho.size(); ++j)
    basis.members.push_back(
        {std::move(ortho[j]), k, static_cast<int>(j) + 1, std::move(norms[j])});
  return cache.emplace(key, std::move(basis)).first->second;
}

std::vector<Form> harmonic_qform_space(int n, int m, int q) {
  if (q < 0 || q > n || m < 0) throw std::invalid_argument("harmonic_qform_space: bad degree");
  std::vector<Form> out;
  for (int k = 0; k <= m; ++k) {
    const HarmonicBasis& basis = harmonic_basis(n, k);
    for (const auto& h : basis.members) {
      Rational unit = rat_from_double(1.0 / std::sqrt(to_double(h.norm_sq)));
      for (const auto& idx : MultiIndex::all(n, q)) {
        Form f(n, q);
        f.set(idx, ScalarField::from_polynomial(h.poly * unit));
        out.push_back(std::move(f));
      }
    }
  }
  return out;
}

bool gram_is_identity(const HarmonicBasis& basis) {
  for (std::size_t i = 0; i < basis.members.size(); ++i)
    for (std::size_t j = i; j < basis.members.size(); ++j) {
      Rational inner = sphere_inner(basis.members[i].poly, basis.members[j].poly);
      if (i == j) {
        if (inner != basis.members[i].norm_sq) return false;
      } else if (!is_zero(inner)) {
        return false;
      }
    }
  return true;
}

}  // namespace derham
