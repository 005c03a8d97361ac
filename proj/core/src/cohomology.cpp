#include "derham/cohomology.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "derham/rational_linalg.hpp"

namespace derham {

CocycleReport cocycle_check(const Form& f, double fd_step) {
  CocycleReport rep;
  rep.degree = f.degree();
  if (f.degree() >= f.ambient()) {
    rep.symbolic_path = true;
    rep.closed_exact = true;
    return rep;
  }
  if (f.symbolic()) {
    rep.symbolic_path = true;
    rep.closed_exact = d(f).symbolic_zero();
    return rep;
  }
  rep.residual = grid_norm(fd_d(f, fd_step), residual_grid(f.ambient()));
  return rep;
}

CocycleReport cococycle_check(const Form& g, double fd_step) {
  CocycleReport rep;
  rep.degree = g.degree();
  if (g.degree() <= 0) {
    rep.symbolic_path = true;
    rep.closed_exact = true;
    return rep;
  }
  if (g.symbolic()) {
    rep.symbolic_path = true;
    rep.closed_exact = codifferential(g).symbolic_zero();
    return rep;
  }
  rep.residual = grid_norm(fd_codifferential(g, fd_step), residual_grid(g.ambient()));
  return rep;
}

namespace {

SolvabilityReport solvability_slice(const Form& f, const Form& g, int m, const QuadratureSpec& spec) {
  const int n = f.ambient();
  const int q = f.degree() - 1;
  SolvabilityReport rep;
  rep.n = n;
  rep.q = q;
  rep.m = m;
  rep.threshold = 10 * spec.tolerance;
  for (int k = 0; k <= m + 1; ++k) {
    const HarmonicBasis& basis = harmonic_basis(n, k);
    for (const auto& h : basis.members) {
      Rational unit = rat_from_double(1.0 / std::sqrt(to_double(h.norm_sq)));
      for (const auto& I : MultiIndex::all(n, q)) {
        Form hq(n, q);
        hq.set(I, ScalarField::from_polynomial(h.poly * unit));
        double value = 0;
        Form dh = d(hq);
        if (!dh.empty() && !f.empty()) value += l2_inner(f, dh, spec);
        Form dsh = codifferential(hq);
        if (!dsh.empty() && !g.empty()) value += l2_inner(g, dsh, spec);
        rep.pairings.push_back({{k, h.j, I}, value});
        rep.max_abs = std::max(rep.max_abs, std::abs(value));
      }
    }
  }
  rep.satisfied = rep.max_abs <= rep.threshold;
  return rep;
}

}  // namespace

SolvabilityReport solvability_check(const Form& f, const Form& g, int m, double declared_delta,
                                    const QuadratureSpec& spec) {
  SolvabilityReport rep;
  CocycleReport cf = cocycle_check(f);
  if (!cf.ok(50 * spec.tolerance)) {
    rep.preconditions_ok = false;
    rep.message = "f is not a cocycle";
    return rep;
  }
  if (!g.empty()) {
    CocycleReport cg = cococycle_check(g);
    if (!cg.ok(50 * spec.tolerance)) {
      rep.preconditions_ok = false;
      rep.message = "g is not a co-cocycle";
      return rep;
    }
  }
  if (!f.empty()) {
    DecayCheck dc = verify_decay(f, declared_delta, spec);
    if (!dc.accepted) {
      rep.preconditions_ok = false;
      rep.message = "declared decay rejected";
      return rep;
    }
  }
  return solvability_slice(f, g, m, spec);
}

SolvabilityReport solvability_check(const TimeSampledForm& f, const TimeSampledForm& g, int m,
                                    double declared_delta, const QuadratureSpec& spec) {
  SolvabilityReport rep;
  if (f.slices.empty()) return rep;
  for (std::size_t i = 0; i < f.slices.size(); ++i) {
    Form gs = i < g.slices.size() ? g.slices[i] : Form(f.ambient(), f.degree() - 2);
    SolvabilityReport slice = solvability_check(f.slices[i], gs, m, declared_delta, spec);
    if (!slice.preconditions_ok) return slice;
    rep.per_time_max.push_back(slice.max_abs);
    rep.max_abs = std::max(rep.max_abs, slice.max_abs);
    if (i == 0) {
      rep.n = slice.n;
      rep.q = slice.q;
      rep.m = slice.m;
      rep.threshold = slice.threshold;
      rep.pairings = std::move(slice.pairings);
    }
  }
  rep.satisfied = rep.max_abs <= rep.threshold;
  return rep;
}

Form class_projection(const Form& f, int m, double declared_delta, const QuadratureSpec& spec) {
  const int n = f.ambient();
  WeightWindow w = classify_delta(n, declared_delta);
  if (w.cls == WindowClass::NonPositive || w.cls == WindowClass::BoundaryExcluded)
    throw std::domain_error("class_projection: " + w.describe());
  if (w.cls == WindowClass::Injection && w.m != m)
    throw std::domain_error("class_projection: declared delta sits in the m=" +
                            std::to_string(w.m) + " window, not m=" + std::to_string(m));
  CocycleReport cr = cocycle_check(f);
  if (!cr.ok(50 * spec.tolerance))
    throw std::domain_error("class_projection: input is not a cocycle");
  MomentTable table = moment_functional(f, m, declared_delta, spec);
  return d(scaled_representative(table, n, f.degree() - 1));
}

Form representative_primitive(int n, int k, int j, const MultiIndex& I) {
  const HarmonicBasis& basis = harmonic_basis(n, k);
  const HarmonicPoly& h = basis.members.at(j - 1);
  Term t(h.poly * Rational(1, n + 2 * k - 2));
  t.theta_pow = n + 2 * k - 2;
  Form rep(n, I.degree());
  rep.set(I, ScalarField::symbolic(n, {t}));
  return rep;
}

namespace {

/// Far-field atoms of a symbolic form: key = (coefficient slot, radial
/// parity, log power, pi power, monomial), after clearing each parity class
/// to its global minimum radial power.
using AtomKey = std::tuple<MultiIndex, int, int, int, ExponentVec>;

std::map<AtomKey, Rational> far_field_vector(
    const Form& f, const std::map<std::tuple<MultiIndex, int, int, int>, int>& min_rho) {
  std::map<AtomKey, Rational> vec;
  const Polynomial r2 = Polynomial::radius_squared(f.ambient());
  for (const auto& [idx, coeff] : f.coeffs()) {
    for (const auto& t : coeff.far_field_terms()) {
      int parity = ((t.rho_pow % 2) + 2) % 2;
      auto group = std::make_tuple(idx, parity, t.log_pow, t.pi_pow);
      int shift = (t.rho_pow - min_rho.at(group)) / 2;
      Polynomial p = t.poly;
      for (int s = 0; s < shift; ++s) p = p * r2;
      for (const auto& [e, c] : p.terms()) {
        auto key = std::make_tuple(idx, parity, t.log_pow, t.pi_pow, e);
        auto [it, fresh] = vec.try_emplace(key, c);
        if (!fresh) it->second += c;
      }
    }
  }
  std::erase_if(vec, [](const auto& kv) { return is_zero(kv.second); });
  return vec;
}

std::map<std::tuple<MultiIndex, int, int, int>, int> collect_min_rho(
    const std::vector<Form>& forms) {
  std::map<std::tuple<MultiIndex, int, int, int>, int> min_rho;
  for (const auto& f : forms)
    for (const auto& [idx, coeff] : f.coeffs())
      for (const auto& t : coeff.far_field_terms()) {
        int parity = ((t.rho_pow % 2) + 2) % 2;
        auto group = std::make_tuple(idx, parity, t.log_pow, t.pi_pow);
        auto [it, fresh] = min_rho.try_emplace(group, t.rho_pow);
        if (!fresh) it->second = std::min(it->second, t.rho_pow);
      }
  return min_rho;
}

RatMatrix atom_matrix(const std::vector<Form>& forms) {
  auto min_rho = collect_min_rho(forms);
  std::vector<std::map<AtomKey, Rational>> vecs;
  std::set<AtomKey> atoms;
  for (const auto& f : forms) {
    vecs.push_back(far_field_vector(f, min_rho));
    for (const auto& [k, v] : vecs.back()) atoms.insert(k);
  }
  std::vector<AtomKey> order(atoms.begin(), atoms.end());
  std::map<AtomKey, int> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  RatMatrix mat(vecs.size(), std::vector<Rational>(order.size(), 0));
  for (std::size_t r = 0; r < vecs.size(); ++r)
    for (const auto& [k, v] : vecs[r]) mat[r][pos.at(k)] = v;
  return mat;
}

}  // namespace

int far_field_rank(const std::vector<Form>& forms) {
  if (forms.empty()) return 0;
  return matrix_rank(atom_matrix(forms));
}

bool in_far_field_span(const std::vector<Form>& family, const Form& candidate) {
  std::vector<Form> all = family;
  all.push_back(candidate);
  RatMatrix mat = atom_matrix(all);
  std::vector<std::vector<Rational>> rows(mat.begin(), mat.end() - 1);
  int base = matrix_rank(rows);
  return matrix_rank(mat) == base;
}

double projection_coefficient_gap(const Form& a, const Form& b) {
  std::vector<Form> pair = {a, b};
  auto min_rho = collect_min_rho(pair);
  auto va = far_field_vector(a, min_rho);
  auto vb = far_field_vector(b, min_rho);
  double gap = 0;
  const double kPi = 3.14159265358979323846264338327950288;
  auto magnitude = [&](const AtomKey& key, const Rational& v) {
    return std::abs(to_double(v) * std::pow(kPi, std::get<3>(key)));
  };
  for (const auto& [k, v] : va) {
    auto it = vb.find(k);
    Rational diff = it == vb.end() ? v : v - it->second;
    gap = std::max(gap, magnitude(k, diff));
  }
  for (const auto& [k, v] : vb)
    if (!va.count(k)) gap = std::max(gap, magnitude(k, v));
  return gap;
}

CohomologyBasis representative_basis(int n, int q_out, int m) {
  if (q_out < 1) throw std::invalid_argument("representative_basis: q_out >= 1");
  if (m < 0) throw std::invalid_argument("representative_basis: m >= 0");
  CohomologyBasis out;
  out.n = n;
  out.q = q_out;
  out.m = m;
  out.window = classify_delta(n, n - 1 + m + 0.5);
  int count_harmonics = 0;
  for (int k = 1; k <= m + 1; ++k) {
    count_harmonics += harmonic_dim(n, k);
    const HarmonicBasis& basis = harmonic_basis(n, k);
    for (const auto& h : basis.members)
      for (const auto& I : MultiIndex::all(n, q_out - 1)) {
        out.labels.push_back({k, h.j, I});
        out.members.push_back(d(representative_primitive(n, k, h.j, I)));
      }
  }
  // Degree-(q_out-1) index count * number of harmonics: the printed bound on
  // the image dimension.
  out.upper_bound = static_cast<int>(MultiIndex::all(n, q_out - 1).size()) * count_harmonics;
  std::vector<Form> nonzero;
  for (const auto& f : out.members)
    if (!f.empty()) nonzero.push_back(f);
  out.rank = far_field_rank(nonzero);
  return out;
}

TimeSampledForm AnisoRepresentative::time_form() const {
  TimeSampledForm u;
  u.grid = grid;
  u.slices = slices;
  return u;
}

AnisoRepresentative aniso_representative_basis(
    int n, int q_out, int m, const std::vector<std::function<double(double)>>& a_fns, double T,
    TimeClassTag time_class, double lambda, int time_points) {
  AnisoRepresentative out;
  out.base = representative_basis(n, q_out, m);
  out.time_class = time_class;
  out.lambda = lambda;
  out.grid = TimeGrid::uniform(T, time_points);
  if (a_fns.size() != out.base.members.size())
    throw std::invalid_argument("aniso_representative_basis: need one a(t) per generator");

  if (time_class == TimeClassTag::c_s_half_lambda) {
    for (std::size_t g = 0; g < a_fns.size(); ++g) {
      TimeClassCheck check = time_class_check(a_fns[g], T, 0.5 * lambda);
      if (!check.accepted)
        throw std::domain_error(
            "aniso_representative_basis: coefficient " + std::to_string(g) +
            " fails the C^{s,lambda/2} time-quotient estimator (grows under refinement)");
    }
  }

  for (std::size_t g = 0; g < a_fns.size(); ++g) {
    out.a_values.emplace_back();
    for (double t : out.grid.times) out.a_values.back().push_back(a_fns[g](t));
  }
  for (std::size_t i = 0; i < out.grid.times.size(); ++i) {
    Form slice(n, q_out);
    for (std::size_t g = 0; g < out.base.members.size(); ++g) {
      double a = out.a_values[g][i];
      if (a == 0) continue;
      slice = slice + out.base.members[g] * rat_from_double(a);
    }
    out.slices.push_back(std::move(slice));
  }
  return out;
}

ConsistencyReport class_map_consistency(const Form& g, const Form& u, int m,
                                        double declared_delta, const QuadratureSpec& spec) {
  ConsistencyReport rep;
  Form du = u.symbolic() ? d(u) : d_analytic(u);
  Form shifted = g + du;
  MomentTable tg = moment_functional(g, m, declared_delta, spec);
  MomentTable ts = moment_functional(shifted, m, declared_delta, spec);
  for (const auto& [key, v] : tg.entries) {
    double w = ts.entries.count(key) ? ts.entries.at(key) : 0.0;
    rep.table_gap = std::max(rep.table_gap, std::abs(v - w));
  }
  const int n = g.ambient();
  Form pg = d(scaled_representative(tg, n, g.degree() - 1));
  Form ps = d(scaled_representative(ts, n, g.degree() - 1));
  rep.projection_gap = projection_coefficient_gap(pg, ps);
  return rep;
}

}  // namespace derham
