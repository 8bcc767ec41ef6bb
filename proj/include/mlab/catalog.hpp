#pragma once

#include "mlab/function.hpp"

#include <string>
#include <vector>

namespace mlab {

/// Builds a function from a catalog JSON entry:
///   {"alpha": number|"inf", "kind": "quadratic"|"cone"|"indicator_polytope"|
///    "indicator_ball"|"piecewise_affine"|"grid", "dim": 1|2, "params": {...}}
AlphaConcaveFunction function_from_json_text(const std::string& text);

/// Serializes a function back into the catalog schema (grids inline).
std::string function_to_json_text(const AlphaConcaveFunction& f);

/// Named built-in catalog.
std::vector<std::string> catalog_ids();
AlphaConcaveFunction catalog_function(const std::string& id);
bool catalog_has(const std::string& id);

}  // namespace mlab
