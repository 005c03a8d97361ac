#include "derham/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace derham {

namespace {

const double kPi = 3.14159265358979323846264338327950288;

std::vector<std::vector<double>> shell_dirs(int n) {
  std::vector<std::vector<double>> dirs;
  for (int i = 0; i < n; ++i)
    for (int s : {-1, 1}) {
      std::vector<double> e(n, 0.0);
      e[i] = s;
      dirs.push_back(std::move(e));
    }
  double inv = 1.0 / std::sqrt(double(n));
  std::vector<double> diag(n, inv);
  dirs.push_back(diag);
  for (int i = 0; i < n; ++i) {
    auto v = diag;
    v[i] = -inv;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

double form_max_at(const Form& f, std::span<const double> x) {
  double m = 0;
  EvalContext ctx(x);
  for (const auto& [idx, c] : f.coeffs()) m = std::max(m, std::abs(c.eval(ctx)));
  return m;
}

const KernelDoubleForm& choose_kernel(int n, int q_out, KernelChoice choice) {
  if (choice.m)
    return truncated_kernel(n, q_out, *choice.m, choice.variant);
  return kernel_phi(n, q_out, choice.variant);
}

}  // namespace

DecayCheck verify_decay(const Form& f, double declared_delta, const QuadratureSpec& spec) {
  const int n = f.ambient();
  const double R = spec.truncation_radius;
  const std::vector<double> radii = {0.35 * R, 0.6 * R, 0.85 * R};
  auto dirs = shell_dirs(n);
  std::vector<double> logs, logw;
  bool all_tiny = true;
  for (double r : radii) {
    double m = 0;
    for (const auto& dir : dirs) {
      std::vector<double> p(n);
      for (int i = 0; i < n; ++i) p[i] = r * dir[i];
      m = std::max(m, form_max_at(f, p));
    }
    if (m > 1e-250) all_tiny = false;
    logs.push_back(std::log(std::max(m, 1e-300)));
    logw.push_back(0.5 * std::log1p(r * r));
  }
  DecayCheck out;
  out.required = declared_delta + 1 - 0.25;
  if (all_tiny) {
    out.fitted_exponent = std::numeric_limits<double>::infinity();
    out.accepted = true;
    return out;
  }
  // least-squares slope of log max|f| against log w
  double sw = 0, sl = 0, sww = 0, swl = 0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    sw += logw[i];
    sl += logs[i];
    sww += logw[i] * logw[i];
    swl += logw[i] * logs[i];
  }
  double k = logs.size();
  double slope = (k * swl - sw * sl) / (k * sww - sw * sw);
  out.fitted_exponent = -slope;
  out.accepted = out.fitted_exponent >= out.required;
  return out;
}

PotentialEvaluator::PotentialEvaluator(Form f, KernelDoubleForm kernel, QuadratureSpec spec)
    : n_(f.ambient()), f_(std::move(f)), kernel_(std::move(kernel)), spec_(std::move(spec)) {
  spec_.validate();
  if (f_.degree() + kernel_.y_degree() != n_)
    throw std::invalid_argument("PotentialEvaluator: f ^ kernel is not a top form");
  out_indices_ = MultiIndex::all(n_, kernel_.x_degree());
  std::map<MultiIndex, int> slot;
  for (std::size_t i = 0; i < out_indices_.size(); ++i)
    slot[out_indices_[i]] = static_cast<int>(i);
  for (const auto& [key, entry] : kernel_.entries()) {
    const auto& [I, J] = key;
    MultiIndex L = J.complement();
    if (!f_.find(L)) continue;
    auto [full, sign] = L.merge(J);
    if (sign == 0) continue;
    pieces_.push_back({slot.at(I), sign, L, &entry});
  }
}

int PotentialEvaluator::out_degree() const { return kernel_.x_degree(); }

std::vector<double> PotentialEvaluator::raw_integrate(std::span<const double> x,
                                                      std::span<const double> center, double r_max,
                                                      const QuadratureSpec& spec) const {
  // Pre-evaluate the separable x-factors once per target.
  struct BakedPiece {
    int out_slot;
    double sign;
    const ScalarField* f_coeff;
    const ScalarField* z_part;
    std::vector<std::pair<double, const ScalarField*>> separable;  // (fx(x), fy)
  };
  std::vector<BakedPiece> baked;
  baked.reserve(pieces_.size());
  for (const auto& p : pieces_) {
    BakedPiece b;
    b.out_slot = p.out_slot;
    b.sign = p.sign;
    b.f_coeff = f_.find(p.L);
    b.z_part = &p.entry->z_part;
    for (const auto& [fx, fy] : p.entry->separable) b.separable.emplace_back(fx.eval(x), &fy);
    baked.push_back(std::move(b));
  }
  const std::vector<double> xv(x.begin(), x.end());
  auto fn = [&baked, &xv, this](std::span<const double> y, double w, std::span<double> out) {
    EvalContext ctx_y(y);
    std::vector<double> z(n_);
    for (int i = 0; i < n_; ++i) z[i] = xv[i] - y[i];
    EvalContext ctx_z(z);
    for (const auto& b : baked) {
      double fv = b.f_coeff->eval(ctx_y);
      if (fv == 0) continue;
      double kv = b.z_part->eval(ctx_z);
      for (const auto& [fxv, fy] : b.separable) kv += fxv * fy->eval(ctx_y);
      out[b.out_slot] += w * b.sign * fv * kv;
    }
  };
  return integrate_polar(n_, center, r_max, static_cast<int>(out_indices_.size()), fn, spec);
}

std::map<MultiIndex, double> PotentialEvaluator::eval(std::span<const double> x) const {
  std::vector<double> key(x.begin(), x.end());
  {
    std::scoped_lock lk(memo_mtx_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  double rx = 0;
  for (double v : x) rx += v * v;
  rx = std::sqrt(rx);
  // Center the polar grid on the singular point when the target sits where
  // the data still has mass; far targets integrate around the origin.
  std::vector<double> origin(n_, 0.0);
  bool at_target = rx <= 6.0;
  std::span<const double> center = at_target ? x : std::span<const double>(origin);
  double r_max = at_target ? spec_.truncation_radius + rx : spec_.truncation_radius;
  auto vals = raw_integrate(x, center, r_max, spec_);
  std::map<MultiIndex, double> out;
  for (std::size_t i = 0; i < out_indices_.size(); ++i) out[out_indices_[i]] = vals[i];
  std::scoped_lock lk(memo_mtx_);
  memo_.emplace(std::move(key), out);
  return out;
}

double PotentialEvaluator::tail_estimate(std::span<const double> x) const {
  // Sample the integrand magnitude on two shells near the truncation edge
  // and bound the remainder by the fitted power law.
  double rx = 0;
  for (double v : x) rx += v * v;
  rx = std::sqrt(rx);
  bool at_target = rx <= 6.0;
  double r_max = at_target ? spec_.truncation_radius + rx : spec_.truncation_radius;
  std::vector<double> center(n_, 0.0);
  if (at_target) center.assign(x.begin(), x.end());

  auto dirs = shell_dirs(n_);
  auto sample = [&](double r) {
    double m = 0;
    for (const auto& dir : dirs) {
      std::vector<double> y(n_);
      for (int i = 0; i < n_; ++i) y[i] = center[i] + r * dir[i];
      EvalContext ctx_y(y);
      std::vector<double> z(n_);
      for (int i = 0; i < n_; ++i) z[i] = x[i] - y[i];
      EvalContext ctx_z(z);
      for (const auto& p : pieces_) {
        double fv = f_.find(p.L)->eval(ctx_y);
        double kv = p.entry->z_part.eval(ctx_z);
        for (const auto& [fx, fy] : p.entry->separable) kv += fx.eval(x) * fy.eval(ctx_y);
        m = std::max(m, std::abs(fv * kv));
      }
    }
    return m;
  };
  double r1 = 0.7 * r_max, r2 = 0.95 * r_max;
  double m1 = sample(r1), m2 = sample(r2);
  if (m2 <= 1e-290) return 0;
  double p = fit_decay_exponent(r1, m1, r2, m2);
  if (p <= n_ + 0.5) return std::numeric_limits<double>::infinity();
  double sigma = 2 * std::pow(kPi, 0.5 * n_) / std::tgamma(0.5 * n_);
  return m2 * std::pow(r_max / r2, -p) * sigma * std::pow(r_max, double(n_)) / (p - n_);
}

double PotentialEvaluator::singular_patch_estimate(std::span<const double> x) const {
  double rx = 0;
  for (double v : x) rx += v * v;
  rx = std::sqrt(rx);
  if (rx > 6.0) return 0;  // far target: the grid is not centered on the singularity
  QuadratureSpec base = spec_;
  base.radial_panels = 2;
  QuadratureSpec fine = base;
  fine.gauss_order += 6;
  double eps = spec_.singular_shell;
  base.singular_shell = fine.singular_shell = 0.5 * eps;
  auto a = raw_integrate(x, x, eps, base);
  auto b = raw_integrate(x, x, eps, fine);
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

PotentialResult potential(const Form& f, KernelChoice choice,
                          const std::vector<std::vector<double>>& x_points,
                          double declared_delta, const QuadratureSpec& spec) {
  DecayCheck decay = verify_decay(f, declared_delta, spec);
  if (!decay.accepted)
    throw std::domain_error("potential: declared decay not met (fitted exponent " +
                            std::to_string(decay.fitted_exponent) + ", needs " +
                            std::to_string(decay.required) + ")");
  const int n = f.ambient();
  int q_out = choice.variant == PhiVariant::phi ? f.degree() - 1 : f.degree() + 1;
  if (q_out < 0 || q_out > n)
    throw std::invalid_argument("potential: output degree out of range");
  PotentialEvaluator ev(f, choose_kernel(n, q_out, choice), spec);
  PotentialResult res;
  res.spec = spec;
  for (const auto& x : x_points) {
    res.values.push_back(ev.eval(x));
    res.tail_estimate = std::max(res.tail_estimate, ev.tail_estimate(x));
    res.singular_patch_estimate =
        std::max(res.singular_patch_estimate, ev.singular_patch_estimate(x));
  }
  if (!(res.tail_estimate <= spec.tolerance))
    throw std::runtime_error("potential: tail estimate exceeds tolerance");
  return res;
}

Form evaluator_form(std::shared_ptr<const PotentialEvaluator> ev) {
  const int n = ev->ambient();
  Form out(n, ev->out_degree());
  for (const auto& idx : MultiIndex::all(n, ev->out_degree())) {
    ScalarField::Sampled s;
    s.value = [ev, idx](std::span<const double> x) { return ev->eval(x).at(idx); };
    out.set(idx, ScalarField::sampled(n, std::move(s)));
  }
  return out;
}

Form potential_form(const Form& f, KernelChoice choice, double declared_delta,
                    const QuadratureSpec& spec) {
  DecayCheck decay = verify_decay(f, declared_delta, spec);
  if (!decay.accepted)
    throw std::domain_error("potential_form: declared decay not met");
  const int n = f.ambient();
  int q_out = choice.variant == PhiVariant::phi ? f.degree() - 1 : f.degree() + 1;
  auto ev =
      std::make_shared<const PotentialEvaluator>(f, choose_kernel(n, q_out, choice), spec);
  return evaluator_form(ev);
}

std::vector<std::vector<double>> residual_grid(int n) {
  std::vector<std::vector<double>> grid;
  const std::vector<double> radii = {0.6, 1.3, 2.0};
  auto dirs = shell_dirs(n);
  // Keep the grid small: potentials cost one quadrature pass per point.
  std::size_t stride = dirs.size() > 6 ? 2 : 1;
  for (double r : radii)
    for (std::size_t i = 0; i < dirs.size(); i += stride) {
      std::vector<double> p(n);
      for (int k = 0; k < n; ++k) p[k] = r * dirs[i][k];
      grid.push_back(std::move(p));
    }
  return grid;
}

double grid_norm(const Form& a, const std::vector<std::vector<double>>& grid) {
  double m = 0;
  for (const auto& x : grid) m = std::max(m, form_max_at(a, x));
  return m;
}

double grid_norm_diff(const Form& a, const Form& b,
                      const std::vector<std::vector<double>>& grid) {
  double m = 0;
  for (const auto& x : grid) {
    EvalContext ctx(x);
    std::map<MultiIndex, double> va, vb;
    for (const auto& [idx, c] : a.coeffs()) va[idx] = c.eval(ctx);
    for (const auto& [idx, c] : b.coeffs()) vb[idx] = c.eval(ctx);
    for (const auto& [idx, v] : va) {
      auto it = vb.find(idx);
      m = std::max(m, std::abs(v - (it == vb.end() ? 0.0 : it->second)));
    }
    for (const auto& [idx, v] : vb)
      if (!va.count(idx)) m = std::max(m, std::abs(v));
  }
  return m;
}

namespace {

/// Numeric closedness residual of a form on the residual grid.
double cocycle_residual(const Form& f, double step) {
  if (f.degree() >= f.ambient()) return 0;
  Form df = f.symbolic() ? d(f) : fd_d(f, step);
  return grid_norm(df, residual_grid(f.ambient()));
}

double cococycle_residual(const Form& g, double step) {
  if (g.degree() <= 0) return 0;
  Form dsg = g.symbolic() ? codifferential(g) : fd_codifferential(g, step);
  return grid_norm(dsg, residual_grid(g.ambient()));
}

}  // namespace

ResidualReport lemma_check(const Form& f, const Form& g, double declared_delta,
                           const QuadratureSpec& spec, double fd_step) {
  ResidualReport rep;
  const int n = f.ambient();
  const double pre_tol = 50 * spec.tolerance;

  if (cocycle_residual(f, fd_step) > pre_tol) {
    rep.preconditions_ok = false;
    rep.message = "f is not a cocycle (df != 0 on the sample grid)";
    return rep;
  }
  if (!g.empty() && cococycle_residual(g, fd_step) > pre_tol) {
    rep.preconditions_ok = false;
    rep.message = "g is not a co-cocycle (d*g != 0 on the sample grid)";
    return rep;
  }
  DecayCheck dc = verify_decay(f, declared_delta, spec);
  if (!f.empty() && !dc.accepted) {
    rep.preconditions_ok = false;
    rep.message = "declared decay rejected: fitted exponent " +
                  std::to_string(dc.fitted_exponent);
    return rep;
  }

  auto grid = residual_grid(n);
  if (!f.empty()) {
    Form phi_f = potential_form(f, KernelChoice::phi(), declared_delta, spec);
    rep.d_phi_residual = grid_norm_diff(fd_d(phi_f, fd_step), f, grid);
    rep.dstar_phi_residual = grid_norm(fd_codifferential(phi_f, fd_step), grid);
  }
  if (!g.empty()) {
    Form phihat_g = potential_form(g, KernelChoice::phi_hat(), declared_delta, spec);
    rep.dstar_phihat_residual = grid_norm_diff(fd_codifferential(phihat_g, fd_step), g, grid);
    rep.d_phihat_residual = grid_norm(fd_d(phihat_g, fd_step), grid);
  }
  return rep;
}

Form solve_system(const Form& f, const Form& g, double declared_delta,
                  const QuadratureSpec& spec) {
  if (f.ambient() != g.ambient()) throw std::invalid_argument("solve_system: dimension mismatch");
  if (f.degree() != g.degree() + 2)
    throw std::invalid_argument("solve_system: need deg f = deg g + 2");
  const int n = f.ambient();
  const int q = f.degree() - 1;
  Form u(n, q);
  bool have = false;
  if (!f.empty()) {
    u = potential_form(f, KernelChoice::phi(), declared_delta, spec);
    have = true;
  }
  if (!g.empty()) {
    Form ug = potential_form(g, KernelChoice::phi_hat(), declared_delta, spec);
    u = have ? u + ug : ug;
    have = true;
  }
  return u;
}

HodgeParts hodge_decompose(const Form& u, double declared_delta, const QuadratureSpec& spec,
                           double fd_step) {
  const int n = u.ambient();
  const int q = u.degree();
  if (!(declared_delta > 0.5 * n))
    throw std::domain_error("hodge_decompose: requires declared delta > n/2");
  DecayCheck dc = verify_decay(u, declared_delta, spec);
  if (!dc.accepted)
    throw std::domain_error("hodge_decompose: decay too slow for the declared delta window");

  HodgeParts parts;
  // w = d Phi u through the x-differentiated kernel; v = d* PhiHat u likewise.
  auto ev_w = std::make_shared<const PotentialEvaluator>(
      u, kernel_phi(n, q - 1, PhiVariant::phi).x_exterior_derivative(), spec);
  auto ev_v = std::make_shared<const PotentialEvaluator>(
      u, kernel_phi(n, q + 1, PhiVariant::phi_hat).x_codifferential(), spec);
  parts.exact_part = evaluator_form(ev_w);
  parts.coexact_part = evaluator_form(ev_v);

  auto grid = residual_grid(n);
  Form sum = parts.exact_part + parts.coexact_part;
  parts.residual = grid_norm_diff(sum, u, grid);
  parts.dstar_v_residual = grid_norm(fd_codifferential(parts.coexact_part, fd_step), grid);
  Form du = u.symbolic() ? d(u) : d_analytic(u);
  parts.dv_du_residual = grid_norm_diff(fd_d(parts.coexact_part, fd_step), du, grid);
  return parts;
}

double MomentTable::max_abs() const {
  double m = 0;
  for (const auto& [k, v] : entries) m = std::max(m, std::abs(v));
  return m;
}

MomentTable moment_functional(const Form& f, int m, double declared_delta,
                              const QuadratureSpec& spec) {
  if (m < 0) throw std::invalid_argument("moment_functional: m >= 0");
  const int n = f.ambient();
  const int q = f.degree() - 1;
  if (q < 0 || q > n) throw std::invalid_argument("moment_functional: bad form degree");
  DecayCheck dc = verify_decay(f, declared_delta, spec);
  if (!dc.accepted) throw std::domain_error("moment_functional: declared decay rejected");

  MomentTable table;
  table.n = n;
  table.q = q;
  table.m = m;

  // Assemble all pairing integrands mu_{k,j,I} = (d*)_y(h(y) star dy_I).
  struct Slot {
    MomentKey key;
    Form mu;  // degree n - q - 1
  };
  std::vector<Slot> slots;
  for (int k = 1; k <= m + 1; ++k) {
    const HarmonicBasis& basis = harmonic_basis(n, k);
    for (const auto& h : basis.members) {
      Rational unit = rat_from_double(1.0 / std::sqrt(to_double(h.norm_sq)));
      for (const auto& I : MultiIndex::all(n, q)) {
        Form hy(n, n - q);
        hy.set(I.complement(),
               ScalarField::from_polynomial(h.poly * (unit * I.complement_sign())));
        slots.push_back({{k, h.j, I}, codifferential(hy)});
      }
    }
  }

  struct Piece {
    int slot;
    int sign;
    const ScalarField* f_coeff;
    const ScalarField* mu_coeff;
  };
  std::vector<Piece> pieces;
  for (std::size_t s = 0; s < slots.size(); ++s)
    for (const auto& [J, mu_c] : slots[s].mu.coeffs()) {
      MultiIndex L = J.complement();
      const ScalarField* fc = f.find(L);
      if (!fc) continue;
      auto [full, sign] = L.merge(J);
      if (sign == 0) continue;
      pieces.push_back({static_cast<int>(s), sign, fc, &mu_c});
    }

  std::vector<double> origin(n, 0.0);
  auto fn = [&pieces](std::span<const double> y, double w, std::span<double> out) {
    EvalContext ctx(y);
    for (const auto& p : pieces) {
      double fv = p.f_coeff->eval(ctx);
      if (fv == 0) continue;
      out[p.slot] += w * p.sign * fv * p.mu_coeff->eval(ctx);
    }
  };
  auto vals = integrate_polar(n, origin, spec.truncation_radius,
                              static_cast<int>(slots.size()), fn, spec);

  // Tail: angular means of each pairing integrand at two shells, power fit.
  const auto& [gx, gw] = gauss_legendre(12);
  auto shell_means = [&](double r) {
    std::vector<double> acc(slots.size(), 0.0);
    auto add_dir = [&](std::span<const double> dir, double w_ang) {
      std::vector<double> y(n);
      for (int i = 0; i < n; ++i) y[i] = r * dir[i];
      EvalContext ctx(y);
      for (const auto& p : pieces)
        acc[p.slot] += w_ang * p.sign * p.f_coeff->eval(ctx) * p.mu_coeff->eval(ctx);
    };
    if (n == 2) {
      const int M = 64;
      for (int i = 0; i < M; ++i) {
        double phi = 2 * kPi * i / M;
        std::vector<double> dir = {std::cos(phi), std::sin(phi)};
        add_dir(dir, 2 * kPi / M);
      }
    } else {
      const int M = 24;
      for (int a = 0; a < 12; ++a)
        for (int i = 0; i < M; ++i) {
          double u = gx[a], su = std::sqrt(std::max(0.0, 1 - u * u));
          double phi = 2 * kPi * i / M;
          std::vector<double> dir = {su * std::cos(phi), su * std::sin(phi), u};
          add_dir(dir, gw[a] * 2 * kPi / M);
        }
    }
    double m_abs = 0;
    for (double v : acc) m_abs = std::max(m_abs, std::abs(v) * std::pow(r, n - 1));
    return m_abs;
  };
  const double R = spec.truncation_radius;
  double m1 = shell_means(0.7 * R), m2 = shell_means(0.95 * R);
  if (m2 <= 1e-290) {
    table.tail_estimate = 0;
  } else {
    double p = fit_decay_exponent(0.7 * R, m1, 0.95 * R, m2);
    table.tail_estimate = p > 1.1 ? m2 * R / (p - 1) : std::numeric_limits<double>::infinity();
  }
  if (!(table.tail_estimate <= 10 * spec.tolerance))
    throw std::runtime_error("moment_functional: tail estimate too large");

  for (std::size_t s = 0; s < slots.size(); ++s) table.entries[slots[s].key] = vals[s];
  return table;
}

namespace {

Form representative_impl(const MomentTable& table, int n, int q, bool scaled) {
  Form rep(n, q);
  SpherePiece sigma = sphere_area_exact(n);
  std::map<MultiIndex, std::vector<Term>> acc;
  for (const auto& [key, c] : table.entries) {
    if (c == 0) continue;
    const HarmonicBasis& basis = harmonic_basis(n, key.k);
    const HarmonicPoly& h = basis.members.at(key.j - 1);
    double unit = 1.0 / std::sqrt(to_double(h.norm_sq));
    Rational coeff = rat_from_double(c * unit) / (n + 2 * key.k - 2);
    Term t(h.poly * coeff);
    t.theta_pow = n + 2 * key.k - 2;
    if (scaled) {
      t.poly = t.poly * (Rational(-1) / sigma.rational);
      t.pi_pow = -sigma.pi_pow;
    }
    acc[key.I].push_back(std::move(t));
  }
  for (auto& [I, terms] : acc) rep.set(I, ScalarField::symbolic(n, std::move(terms)));
  return rep;
}

}  // namespace

Form representative_from_moments(const MomentTable& table, int n, int q) {
  return representative_impl(table, n, q, false);
}

Form scaled_representative(const MomentTable& table, int n, int q) {
  return representative_impl(table, n, q, true);
}

}  // namespace derham
