#include "mlab/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical lab for alpha-affine minorants and symmetrization"};
  app.require_subcommand(0, 1);

  std::string config_path, function_id, out_dir = ".", output, normal_csv;
  int N = -1, steps = -1, jobs = 0;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  bool alpha_inf = false, plot = false, dump_minorant = false;
  long long seed = -1, resolution = -1;

  app.add_option("--config", config_path, "JSON config (single spec or {\"experiments\": [...]})");
  app.add_option("--function", function_id, "catalog function id");
  app.add_option("--N", N, "break point budget");
  app.add_option("--alpha", alpha, "override the concavity parameter");
  app.add_flag("--alpha-inf", alpha_inf, "override alpha to +inf (indicator case)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--jobs", jobs, "parallel experiments in a batch");
  app.add_option("--out", out_dir, "output directory for results.csv / results.json / plots");
  app.add_option("--output", output, "artifact path (grid .grid/.json, minorant .json)");
  app.add_option("--steps", steps, "symmetrization steps for steiner-chain");
  app.add_option("--normal", normal_csv, "hyperplane normal, comma separated");
  app.add_option("--resolution", resolution, "grid samples per axis");
  app.add_flag("--plot", plot, "emit SVG plots");
  app.add_flag("--dump-minorant", dump_minorant, "write the best minorant as JSON");

  std::vector<std::string> commands = {"verify-theorem", "macbeath-pair", "steiner-chain",
                                       "minorant",       "rearrange",     "symmetrize",
                                       "recover-macbeath", "run"};
  for (const auto& c : commands) app.add_subcommand(c, "")->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<mlab::ExperimentSpec> specs;
    if (!config_path.empty()) specs = mlab::specs_from_config_text(slurp(config_path));
    std::string command;
    for (const auto& c : commands)
      if (app.get_subcommand_ptr(c)->parsed()) command = c;

    if (specs.empty()) {
      if (command.empty() || command == "run") {
        std::cerr << "error: no command and no config experiments given\n";
        return 1;
      }
      specs.emplace_back();
    }
    for (auto& s : specs) {
      if (!command.empty() && command != "run") s.command = command;
      if (!function_id.empty()) s.function_id = function_id;
      if (N >= 0) s.N = N;
      if (alpha_inf)
        s.alpha_override = std::numeric_limits<double>::quiet_NaN();
      else if (!std::isnan(alpha))
        s.alpha_override = alpha;
      if (seed >= 0) {
        s.seed = static_cast<std::uint64_t>(seed);
        s.optimizer.seed = s.seed;
      }
      if (steps > 0) s.steps = steps;
      if (resolution > 1) s.resolution = resolution;
      if (!output.empty()) s.output = output;
      if (plot) s.plot = true;
      if (dump_minorant) s.dump_minorant = true;
      if (!normal_csv.empty()) {
        s.normal.clear();
        std::stringstream ss(normal_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) s.normal.push_back(std::stod(tok));
      }
      if (s.command.empty()) {
        std::cerr << "error: experiment without a command\n";
        return 1;
      }
      if (s.function_id.empty()) {
        std::cerr << "error: no function given (use --function or the config)\n";
        return 1;
      }
    }
    mlab::BatchResult batch =
        mlab::run_batch(specs, out_dir, jobs > 0 ? static_cast<unsigned>(jobs) : 0);
    std::cout << batch.csv;
    if (batch.exit_code == 2) std::cerr << "certificate violation: see results.csv\n";
    return batch.exit_code;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
