#pragma once

#include <json.hpp>

#include "derham/form.hpp"

namespace derham {

/// Shared JSON encoding of symbolic forms:
///   { "n": int, "degree": int, "coeffs": [
///       { "index": [ints], "poly": [[num, den, exps...]],
///         "theta_power": int, "radial_power": int, "log": bool } ] }
/// One coeffs[] entry per product term; repeated indices add up. Extension
/// fields "pi_power" and "theta_deriv_powers" appear only when nonzero.
/// Rational parts outside int64 range are encoded as decimal strings.
nlohmann::json form_to_json(const Form& f);
Form form_from_json(const nlohmann::json& j);

std::string csv_escape(const std::string& s);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace derham
