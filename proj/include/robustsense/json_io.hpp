#pragma once

#include <string>

#include <json.hpp>

#include "robustsense/core.hpp"

namespace robustsense {

// Shared instance config format. Top-level keys: "variables" (lower, upper,
// binary; continuous entries before binary ones), "constraints" (coeffs,
// rel, rhs), "f0", "blocks" (norm, nominal, perturbable, terms). Term kinds:
// "affine_piece" (slope, intercept, base, loadings of {param, var, coeff})
// and "detection" (weight, rate_scale, var). Doubles round-trip losslessly.

nlohmann::json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& j);

std::string serialize_instance(const ProblemInstance& inst);  // 2-space indent
ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& inst, const std::string& path);

}  // namespace robustsense
