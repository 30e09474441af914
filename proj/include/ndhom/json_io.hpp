#pragma once

#include <string>

#include <json.hpp>

#include "ndhom/field.hpp"

namespace ndhom {

/// Field JSON:
///   scalar: {"dimension": n, "terms": [{"k": [k1,..,kn], "phase": "cos"|"sin",
///            "amp": x}, ...], "resolution": N}
///   matrix: {"dimension": n, "entries": {"11": [...terms...], "12": [...], ...},
///            "resolution": N}  -- upper triangle, 1-based "kl" keys.
/// "resolution" is optional on input (a default is chosen from the bandwidth).

nlohmann::json terms_to_json(const std::vector<WaveTerm>& terms, int dim);
std::vector<WaveTerm> terms_from_json(const nlohmann::json& j, int dim);

nlohmann::json scalar_field_to_json(const ScalarField& f, double amp_tol = 1e-14);
ScalarField scalar_field_from_json(const nlohmann::json& j);

nlohmann::json coefficient_field_to_json(const CoefficientField& A, double amp_tol = 1e-14);
CoefficientField coefficient_field_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

} // namespace ndhom
