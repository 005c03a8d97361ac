#include "derham/scalar_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "derham/theta.hpp"

namespace derham {

namespace {

const double kPi = 3.14159265358979323846264338327950288;

double ipow(double base, int e) {
  if (e < 0) return 1.0 / ipow(base, -e);
  double acc = 1, b = base;
  for (int k = e; k > 0; k >>= 1) {
    if (k & 1) acc *= b;
    b *= b;
  }
  return acc;
}

using TermKey = std::tuple<int, int, std::vector<std::pair<int, int>>, int, int>;

TermKey key_of(const Term& t) {
  return {t.rho_pow, t.theta_pow, t.theta_derivs, t.log_pow, t.pi_pow};
}

void push_deriv(std::vector<std::pair<int, int>>& derivs, int order, int count = 1) {
  for (auto& [o, p] : derivs)
    if (o == order) {
      p += count;
      return;
    }
  derivs.emplace_back(order, count);
  std::sort(derivs.begin(), derivs.end());
}

}  // namespace

void Term::normalize() {
  if (poly.zero()) {
    rho_pow = theta_pow = log_pow = pi_pow = 0;
    theta_derivs.clear();
    return;
  }
  if (rho_pow >= 2) {
    Polynomial r2 = Polynomial::radius_squared(poly.vars());
    while (rho_pow >= 2) {
      poly = poly * r2;
      rho_pow -= 2;
    }
  }
  std::erase_if(theta_derivs, [](const auto& op) { return op.second == 0; });
  std::sort(theta_derivs.begin(), theta_derivs.end());
}

bool Term::same_key(const Term& o) const { return key_of(*this) == key_of(o); }

EvalContext::EvalContext(std::span<const double> point) : x(point.begin(), point.end()) {
  r2 = 0;
  for (double v : x) r2 += v * v;
  r = std::sqrt(r2);
  log_r = r > 0 ? std::log(r) : -std::numeric_limits<double>::infinity();
  theta = theta_radial(r);
  theta_d1 = theta_radial_d1(r);
  theta_d2 = theta_radial_d2(r);
}

ScalarField ScalarField::constant(int n, const Rational& c) {
  return from_polynomial(Polynomial(n, c));
}

ScalarField ScalarField::symbolic(int n, std::vector<Term> terms) {
  ScalarField f(n);
  f.terms_ = std::move(terms);
  f.normalize_and_compile();
  return f;
}

ScalarField ScalarField::from_polynomial(Polynomial p) {
  ScalarField f(p.vars());
  f.terms_.emplace_back(std::move(p));
  f.normalize_and_compile();
  return f;
}

ScalarField ScalarField::sampled(int n, Sampled s) {
  ScalarField f(n);
  f.sampled_ = std::move(s);
  return f;
}

const std::vector<Term>& ScalarField::terms() const {
  if (sampled_) throw std::logic_error("ScalarField: sampled field has no terms");
  return terms_;
}

const ScalarField::Sampled& ScalarField::sampled_data() const {
  if (!sampled_) throw std::logic_error("ScalarField: symbolic field has no sample data");
  return *sampled_;
}

int ScalarField::smoothness() const { return sampled_ ? sampled_->smoothness : 1000; }

double ScalarField::validity_radius() const {
  return sampled_ ? sampled_->validity_radius : std::numeric_limits<double>::infinity();
}

void ScalarField::normalize_and_compile() {
  // Merge terms sharing a factor key.
  std::map<TermKey, Polynomial> merged;
  for (auto& t : terms_) {
    t.normalize();
    if (t.poly.zero()) continue;
    auto [it, fresh] = merged.try_emplace(key_of(t), t.poly);
    if (!fresh) it->second += t.poly;
  }
  terms_.clear();
  for (auto& [key, poly] : merged) {
    if (poly.zero()) continue;
    Term t(std::move(poly));
    std::tie(t.rho_pow, t.theta_pow, t.theta_derivs, t.log_pow, t.pi_pow) = key;
    terms_.push_back(std::move(t));
  }

  compiled_.clear();
  for (const auto& t : terms_) {
    for (const auto& [exps, c] : t.poly.terms()) {
      CompiledTerm ct;
      ct.coeff = to_double(c) * ipow(kPi, t.pi_pow);
      for (int i = 0; i < n_; ++i)
        if (exps[i] != 0) ct.exps.emplace_back(i, exps[i]);
      ct.rho_pow = t.rho_pow;
      ct.theta_pow = t.theta_pow;
      ct.log_pow = t.log_pow;
      for (const auto& [o, p] : t.theta_derivs) {
        if (o == 1)
          ct.d1 = p;
        else if (o == 2)
          ct.d2 = p;
        else if (p > 0)
          ct.d2 = -1;  // marker: order > 2, not numerically evaluable
      }
      compiled_.push_back(std::move(ct));
    }
  }
}

// Grouped exact zero test: within each (theta, derivs, log, pi, rho-parity)
// class, clear the radial power to the group minimum and test the resulting
// polynomial sum. |x| is irrational over the rational functions, so the
// classes vanish independently.
static bool grouped_zero(int n, const std::vector<Term>& terms) {
  using GroupKey = std::tuple<int, std::vector<std::pair<int, int>>, int, int, int>;
  std::map<GroupKey, std::vector<const Term*>> groups;
  for (const auto& t : terms) {
    if (t.poly.zero()) continue;
    int parity = ((t.rho_pow % 2) + 2) % 2;
    groups[{t.theta_pow, t.theta_derivs, t.log_pow, t.pi_pow, parity}].push_back(&t);
  }
  Polynomial r2 = Polynomial::radius_squared(n);
  for (const auto& [key, members] : groups) {
    int rmin = members.front()->rho_pow;
    for (const Term* t : members) rmin = std::min(rmin, t->rho_pow);
    Polynomial sum(n);
    for (const Term* t : members) {
      Polynomial p = t->poly;
      for (int k = 0; k < (t->rho_pow - rmin) / 2; ++k) p = p * r2;
      sum += p;
    }
    if (!sum.zero()) return false;
  }
  return true;
}

bool ScalarField::symbolic_zero() const {
  if (sampled_) return false;
  return grouped_zero(n_, terms_);
}

std::vector<Term> ScalarField::far_field_terms() const {
  std::vector<Term> out;
  for (const auto& t : terms()) {
    Term u = t;
    u.rho_pow -= u.theta_pow;  // theta = |x| on |x| >= 2
    u.theta_pow = 0;
    bool dead = false;
    for (const auto& [o, p] : u.theta_derivs)
      if (o >= 2 && p > 0) dead = true;  // theta'' and higher vanish there
    if (dead) continue;
    u.theta_derivs.clear();  // theta' = 1
    u.normalize();
    out.push_back(std::move(u));
  }
  return out;
}

bool ScalarField::far_field_zero() const {
  if (sampled_) return false;
  return grouped_zero(n_, far_field_terms());
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
  if (n_ != o.n_) throw std::invalid_argument("ScalarField: dimension mismatch");
  if (!sampled_ && !o.sampled_) {
    std::vector<Term> ts = terms_;
    ts.insert(ts.end(), o.terms_.begin(), o.terms_.end());
    return symbolic(n_, std::move(ts));
  }
  ScalarField a = *this, b = o;
  Sampled s;
  s.value = [a, b](std::span<const double> x) { return a.eval(x) + b.eval(x); };
  bool have_partials = (a.sampled_ ? bool(a.sampled_->partial) : true) &&
                       (b.sampled_ ? bool(b.sampled_->partial) : true);
  if (have_partials)
    s.partial = [a, b](int axis) { return a.partial(axis) + b.partial(axis); };
  s.validity_radius = std::min(a.validity_radius(), b.validity_radius());
  s.smoothness = std::min(a.smoothness(), b.smoothness());
  return sampled(n_, std::move(s));
}

ScalarField ScalarField::operator-() const {
  if (!sampled_) {
    std::vector<Term> ts = terms_;
    for (auto& t : ts) t.poly = -t.poly;
    return symbolic(n_, std::move(ts));
  }
  return *this * Rational(-1);
}

ScalarField ScalarField::operator-(const ScalarField& o) const { return *this + (-o); }

ScalarField ScalarField::operator*(const ScalarField& o) const {
  if (n_ != o.n_) throw std::invalid_argument("ScalarField: dimension mismatch");
  if (!sampled_ && !o.sampled_) {
    std::vector<Term> ts;
    for (const auto& a : terms_)
      for (const auto& b : o.terms_) {
        Term t(a.poly * b.poly);
        t.rho_pow = a.rho_pow + b.rho_pow;
        t.theta_pow = a.theta_pow + b.theta_pow;
        t.theta_derivs = a.theta_derivs;
        for (const auto& [ord, p] : b.theta_derivs) push_deriv(t.theta_derivs, ord, p);
        t.log_pow = a.log_pow + b.log_pow;
        t.pi_pow = a.pi_pow + b.pi_pow;
        ts.push_back(std::move(t));
      }
    return symbolic(n_, std::move(ts));
  }
  ScalarField a = *this, b = o;
  Sampled s;
  s.value = [a, b](std::span<const double> x) { return a.eval(x) * b.eval(x); };
  bool have_partials = (a.sampled_ ? bool(a.sampled_->partial) : true) &&
                       (b.sampled_ ? bool(b.sampled_->partial) : true);
  if (have_partials)
    s.partial = [a, b](int axis) { return a.partial(axis) * b + a * b.partial(axis); };
  s.validity_radius = std::min(a.validity_radius(), b.validity_radius());
  s.smoothness = std::min(a.smoothness(), b.smoothness());
  return sampled(n_, std::move(s));
}

ScalarField ScalarField::operator*(const Rational& c) const {
  if (!sampled_) {
    std::vector<Term> ts = terms_;
    for (auto& t : ts) t.poly = t.poly * c;
    return symbolic(n_, std::move(ts));
  }
  ScalarField a = *this;
  double cd = to_double(c);
  Sampled s;
  s.value = [a, cd](std::span<const double> x) { return cd * a.eval(x); };
  if (a.sampled_->partial) s.partial = [a, c](int axis) { return a.partial(axis) * c; };
  s.validity_radius = a.validity_radius();
  s.smoothness = a.smoothness();
  return sampled(n_, std::move(s));
}

ScalarField ScalarField::partial(int axis) const {
  if (axis < 1 || axis > n_) throw std::invalid_argument("partial: axis out of range");
  if (sampled_) {
    if (!sampled_->partial)
      throw std::domain_error(
          "ScalarField: sampled coefficient has no analytic derivative; use fd_d");
    return sampled_->partial(axis);
  }
  std::vector<Term> out;
  Polynomial xi = Polynomial::variable(n_, axis);
  for (const auto& t : terms_) {
    // polynomial factor
    {
      Term u = t;
      u.poly = t.poly.partial(axis);
      if (!u.poly.zero()) out.push_back(std::move(u));
    }
    // |x|^r: r x_i |x|^(r-2)
    if (t.rho_pow != 0) {
      Term u = t;
      u.poly = t.poly * xi * Rational(t.rho_pow);
      u.rho_pow = t.rho_pow - 2;
      out.push_back(std::move(u));
    }
    // theta^(-p): -p x_i theta^(-p-1) theta' / |x|
    if (t.theta_pow != 0) {
      Term u = t;
      u.poly = t.poly * xi * Rational(-t.theta_pow);
      u.theta_pow = t.theta_pow + 1;
      u.rho_pow = t.rho_pow - 1;
      push_deriv(u.theta_derivs, 1);
      out.push_back(std::move(u));
    }
    // (theta^(o))^a: a (theta^(o))^(a-1) theta^(o+1) x_i / |x|
    for (std::size_t k = 0; k < t.theta_derivs.size(); ++k) {
      auto [ord, p] = t.theta_derivs[k];
      Term u = t;
      u.poly = t.poly * xi * Rational(p);
      u.rho_pow = t.rho_pow - 1;
      u.theta_derivs[k].second -= 1;
      push_deriv(u.theta_derivs, ord + 1);
      out.push_back(std::move(u));
    }
    // log^l: l x_i |x|^(-2) log^(l-1)
    if (t.log_pow != 0) {
      Term u = t;
      u.poly = t.poly * xi * Rational(t.log_pow);
      u.rho_pow = t.rho_pow - 2;
      u.log_pow = t.log_pow - 1;
      out.push_back(std::move(u));
    }
  }
  return symbolic(n_, std::move(out));
}

ScalarField ScalarField::laplacian() const {
  ScalarField acc = ScalarField::zero(n_);
  for (int i = 1; i <= n_; ++i) acc = acc + partial(i).partial(i);
  return acc;
}

double ScalarField::eval(std::span<const double> x) const {
  if (sampled_) return sampled_->value(x);
  EvalContext ctx(x);
  return eval(ctx);
}

double ScalarField::eval(const EvalContext& ctx) const {
  if (sampled_) return sampled_->value(ctx.x);
  double acc = 0;
  for (const auto& ct : compiled_) {
    if (ct.d2 < 0) throw std::domain_error("ScalarField: theta derivative of order > 2");
    double v = ct.coeff;
    for (const auto& [var, p] : ct.exps) v *= ipow(ctx.x[var], p);
    if (ct.rho_pow != 0) v *= ipow(ctx.r, ct.rho_pow);
    if (ct.theta_pow != 0) v /= ipow(ctx.theta, ct.theta_pow);
    if (ct.d1 != 0) v *= ipow(ctx.theta_d1, ct.d1);
    if (ct.d2 != 0) v *= ipow(ctx.theta_d2, ct.d2);
    if (ct.log_pow != 0) v *= ipow(ctx.log_r, ct.log_pow);
    acc += v;
  }
  return acc;
}

Rational ScalarField::eval_exact(std::span<const Rational> x) const {
  if (sampled_) throw std::domain_error("eval_exact: sampled field");
  Rational r2 = 0;
  for (const auto& v : x) r2 += v * v;
  Rational acc = 0;
  for (const auto& t : terms_) {
    if (t.pi_pow != 0) throw std::domain_error("eval_exact: pi factor present");
    if (t.log_pow != 0) throw std::domain_error("eval_exact: log factor present");
    Rational v = t.poly.eval(x);
    bool need_r = t.rho_pow % 2 != 0;
    Rational r(0);
    if (need_r || t.theta_pow != 0 || !t.theta_derivs.empty()) {
      // |x| must itself be rational
      mpq_class root;
      mpz_class num_root, den_root;
      if (!mpz_perfect_square_p(r2.get_num().get_mpz_t()) ||
          !mpz_perfect_square_p(r2.get_den().get_mpz_t()))
        throw std::domain_error("eval_exact: |x| is irrational here");
      mpz_sqrt(num_root.get_mpz_t(), r2.get_num().get_mpz_t());
      mpz_sqrt(den_root.get_mpz_t(), r2.get_den().get_mpz_t());
      r = Rational(num_root, den_root);
      r.canonicalize();
    }
    // |x|^rho
    if (t.rho_pow != 0) {
      Rational f = 1;
      int e = t.rho_pow;
      Rational base = (e % 2 == 0) ? r2 : r;
      int steps = (e % 2 == 0) ? std::abs(e) / 2 : std::abs(e);
      for (int k = 0; k < steps; ++k) f *= base;
      v *= (e > 0) ? f : Rational(1) / f;
    }
    if (t.theta_pow != 0 || !t.theta_derivs.empty()) {
      bool outer = r >= 2, plateau = r <= 1;
      if (!outer && !plateau) throw std::domain_error("eval_exact: point inside theta splice");
      Rational th = outer ? r : Rational(2);
      for (int k = 0; k < t.theta_pow; ++k) v /= th;
      for (const auto& [ord, p] : t.theta_derivs) {
        Rational dval = 0;
        if (ord == 1) dval = outer ? 1 : 0;
        // all higher derivatives vanish on both flats
        for (int k = 0; k < p; ++k) v *= dval;
      }
    }
    acc += v;
  }
  return acc;
}

}  // namespace derham
