#include "derham/serialization.hpp"

#include <fstream>

namespace derham {

namespace {

nlohmann::json encode_mpz(const mpz_class& z) {
  if (z.fits_slong_p()) return static_cast<long>(z.get_si());
  return z.get_str();
}

mpz_class decode_mpz(const nlohmann::json& j) {
  if (j.is_string()) return mpz_class(j.get<std::string>());
  return mpz_class(j.get<long>());
}

}  // namespace

nlohmann::json form_to_json(const Form& f) {
  nlohmann::json out;
  out["n"] = f.ambient();
  out["degree"] = f.degree();
  auto coeffs = nlohmann::json::array();
  for (const auto& [idx, field] : f.coeffs()) {
    if (!field.symbolic_rep())
      throw std::domain_error("form_to_json: sampled coefficients are not serializable");
    for (const auto& t : field.terms()) {
      nlohmann::json entry;
      entry["index"] = idx.entries();
      auto poly = nlohmann::json::array();
      for (const auto& [e, c] : t.poly.terms()) {
        nlohmann::json row = nlohmann::json::array();
        row.push_back(encode_mpz(c.get_num()));
        row.push_back(encode_mpz(c.get_den()));
        for (int ev : e) row.push_back(ev);
        poly.push_back(std::move(row));
      }
      entry["poly"] = std::move(poly);
      entry["theta_power"] = t.theta_pow;
      entry["radial_power"] = t.rho_pow;
      entry["log"] = t.log_pow != 0;
      if (t.log_pow > 1) entry["log_power"] = t.log_pow;
      if (t.pi_pow != 0) entry["pi_power"] = t.pi_pow;
      if (!t.theta_derivs.empty()) {
        auto derivs = nlohmann::json::array();
        for (const auto& [o, p] : t.theta_derivs) derivs.push_back({o, p});
        entry["theta_deriv_powers"] = std::move(derivs);
      }
      coeffs.push_back(std::move(entry));
    }
  }
  out["coeffs"] = std::move(coeffs);
  return out;
}

Form form_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int degree = j.at("degree").get<int>();
  Form f(n, degree);
  std::map<MultiIndex, std::vector<Term>> acc;
  for (const auto& entry : j.at("coeffs")) {
    MultiIndex idx(entry.at("index").get<std::vector<int>>(), n);
    Term t;
    Polynomial p(n);
    for (const auto& row : entry.at("poly")) {
      Rational c(decode_mpz(row.at(0)), decode_mpz(row.at(1)));
      c.canonicalize();
      ExponentVec e(n);
      for (int i = 0; i < n; ++i) e[i] = row.at(2 + i).get<int>();
      p.add(e, c);
    }
    t.poly = std::move(p);
    t.theta_pow = entry.at("theta_power").get<int>();
    t.rho_pow = entry.at("radial_power").get<int>();
    t.log_pow = entry.at("log").get<bool>() ? 1 : 0;
    if (entry.contains("log_power")) t.log_pow = entry.at("log_power").get<int>();
    if (entry.contains("pi_power")) t.pi_pow = entry.at("pi_power").get<int>();
    if (entry.contains("theta_deriv_powers"))
      for (const auto& row : entry.at("theta_deriv_powers"))
        t.theta_derivs.emplace_back(row.at(0).get<int>(), row.at(1).get<int>());
    acc[idx].push_back(std::move(t));
  }
  for (auto& [idx, terms] : acc) f.set(idx, ScalarField::symbolic(n, std::move(terms)));
  return f;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_escape(header[i]);
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i]);
    out << "\n";
  }
}

}  // namespace derham
