#pragma once

#include "mlab/approx.hpp"
#include "mlab/catalog.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlab {

/// One batch entry; maps onto the CLI commands.
struct ExperimentSpec {
  std::string command;  // verify-theorem | macbeath-pair | steiner-chain | minorant |
                        // rearrange | symmetrize | recover-macbeath
  std::string function_id;     // catalog id, or "inline"
  std::string function_json;   // inline catalog entry when function_id == "inline"
  int N = 4;
  std::optional<double> alpha_override;  // NaN encodes +inf in CLI flags
  std::uint64_t seed = 1;
  int steps = 200;                    // steiner-chain
  std::vector<double> normal;         // symmetrize direction (defaults to e_1)
  std::vector<int> sweepN;            // recover-macbeath (defaults to 4..8)
  std::int64_t resolution = 513;
  std::string output;                 // artifact path for rearrange/symmetrize/minorant
  bool plot = false;
  bool dump_minorant = false;
  OptimizerConfig optimizer;
};

/// One CSV row; the column set is fixed across commands.
struct ExperimentRow {
  std::string experiment;
  std::string function_id;
  double alpha = 0.0;
  int n = 0;
  int N = 0;
  double J_f = std::nan("");
  double J_fstar = std::nan("");
  double bestmass_f = std::nan("");
  double bestmass_fstar = std::nan("");
  double G_f = std::nan("");
  double G_fstar = std::nan("");
  double gap = std::nan("");
  bool certificate_ok = true;
  std::uint64_t seed = 0;

  std::string csv() const;
  static std::string csv_header();
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::string log_json;  // per-experiment details (timestamps live here only)
  bool certificates_ok = true;
};

ExperimentResult run(const ExperimentSpec& spec);
ExperimentResult run_with_outdir(const ExperimentSpec& spec, const std::string& out_dir);

struct BatchResult {
  int exit_code = 0;  // 0 ok, 2 certificate violation
  std::string csv;
  std::string log_json;
};

/// Runs a batch in parallel (up to `jobs`), buffering rows in spec order, and
/// writes results.csv / results.json (+ plots) under out_dir.
BatchResult run_batch(const std::vector<ExperimentSpec>& specs, const std::string& out_dir,
                      unsigned jobs);

/// Parses a config file: either a single spec object or {"experiments": [...]}.
std::vector<ExperimentSpec> specs_from_config_text(const std::string& text);

/// Resolves the function named by a spec (catalog or inline, alpha override).
AlphaConcaveFunction resolve_function(const ExperimentSpec& spec);

}  // namespace mlab
