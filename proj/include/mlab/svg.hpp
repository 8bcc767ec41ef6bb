#pragma once

#include <string>
#include <utility>
#include <vector>

namespace mlab {

/// Minimal standalone SVG line/scatter chart. Deterministic bytes for
/// identical input; throws on an empty series or I/O failure.
void emit_plot(const std::vector<std::pair<double, double>>& series, const std::string& path,
               const std::string& title = "");

}  // namespace mlab
