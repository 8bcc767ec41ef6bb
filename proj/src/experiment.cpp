#include "mlab/experiment.hpp"

#include "mlab/parallel.hpp"
#include "mlab/rng.hpp"
#include "mlab/svg.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace mlab {

namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double alpha_as_double(const AlphaParam& a) { return a.is_inf() ? kInf : a.value(); }

// Criterion-style certificate slack for the theorem direction.
struct TheoremCheck {
  MassResult J_f, J_fstar;
  MinorantSolution on_f, on_fstar;
  double gap = 0.0;
  bool ok = false;
};

TheoremCheck theorem_check(const AlphaConcaveFunction& f, int N, const OptimizerConfig& cfg) {
  TheoremCheck t;
  AlphaConcaveFunction star = rearrange(f);
  t.J_f = total_mass(f);
  t.J_fstar = total_mass(star);
  OptimizerConfig cfg_f = cfg;
  cfg_f.symmetricAnsatz = false;
  OptimizerConfig cfg_star = cfg;
  cfg_star.symmetricAnsatz = true;  // the f* side maximum must be trustworthy
  t.on_f = best_minorant(f, N, cfg_f);
  t.on_fstar = best_minorant(star, N, cfg_star);
  t.gap = t.on_f.optimizerGap + t.on_fstar.optimizerGap;
  t.ok = t.on_f.mass.value >= t.on_fstar.mass.value - t.gap;
  return t;
}

void write_function_artifact(const AlphaConcaveFunction& f, const std::string& path,
                             std::int64_t resolution) {
  if (path.empty()) return;
  auto sample_grid = [&]() {
    Box box = f.support_box().padded(0.1);
    std::int64_t res = resolution % 2 == 0 ? resolution + 1 : resolution;
    if (f.dim() == 1) {
      std::vector<double> vals(res);
      double h = (box.hi[0] - box.lo[0]) / static_cast<double>(res - 1);
      for (std::int64_t i = 0; i < res; ++i) vals[i] = eval(f, vec1(box.lo[0] + h * i));
      return GridFunction(box, {res}, std::move(vals), f.tail_mass_bound());
    }
    std::vector<double> vals(res * res);
    double h0 = (box.hi[0] - box.lo[0]) / static_cast<double>(res - 1);
    double h1 = (box.hi[1] - box.lo[1]) / static_cast<double>(res - 1);
    for (std::int64_t i = 0; i < res; ++i)
      for (std::int64_t j = 0; j < res; ++j)
        vals[i * res + j] = eval(f, vec2(box.lo[0] + h0 * i, box.lo[1] + h1 * j));
    return GridFunction(box, {res, res}, std::move(vals), f.tail_mass_bound());
  };
  if (auto* g = std::get_if<GridBase>(&f.base())) {
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
      std::ofstream out(path);
      out << g->grid->to_json();
    } else {
      g->grid->save_binary(path);
    }
    return;
  }
  GridFunction grid = sample_grid();
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    std::ofstream out(path);
    out << grid.to_json();
  } else {
    grid.save_binary(path);
  }
}

ExperimentResult run_verify_theorem(const ExperimentSpec& spec, const AlphaConcaveFunction& f) {
  ExperimentResult res;
  TheoremCheck t = theorem_check(f, spec.N, spec.optimizer);
  ExperimentRow row;
  row.experiment = spec.command;
  row.function_id = spec.function_id;
  row.alpha = alpha_as_double(f.alpha());
  row.n = f.dim();
  row.N = spec.N;
  row.seed = spec.seed;
  row.J_f = t.J_f.value;
  row.J_fstar = t.J_fstar.value;
  row.bestmass_f = t.on_f.mass.value;
  row.bestmass_fstar = t.on_fstar.mass.value;
  row.G_f = t.J_f.value - t.on_f.mass.value;
  row.G_fstar = t.J_fstar.value - t.on_fstar.mass.value;
  row.gap = t.gap;
  row.certificate_ok = t.ok;
  res.rows.push_back(row);
  json log;
  log["theorem_grade_N"] = spec.N >= f.dim() + 2;
  log["restart_masses_f"] = t.on_f.restartMasses;
  log["restart_masses_fstar"] = t.on_fstar.restartMasses;
  res.log_json = log.dump();
  res.certificates_ok = t.ok;
  return res;
}

ExperimentResult run_macbeath_pair(const ExperimentSpec& spec, const AlphaConcaveFunction& f) {
  ExperimentResult res;
  Rng rng(spec.seed);
  Hyperplane H{f.dim() == 1 ? vec1(1.0) : rng.unit_vector(2)};
  const Vec u = H.normal;

  // random admissible configuration: pick x in the support, a height below
  // f(x), decompose, then a random offset inside the symmetral chord
  std::vector<SymmetralPoint> pts;
  const Box box = f.support_box();
  int wanted = std::max(3, spec.N);
  int guard = 0;
  while (static_cast<int>(pts.size()) < wanted && guard++ < 1000) {
    Vec x(f.dim());
    for (int a = 0; a < f.dim(); ++a) x[a] = rng.uniform(box.lo[a], box.hi[a]);
    double fx = eval(f, x);
    if (!(fx > 1e-8 * f.max_value())) continue;
    double y = fx * std::pow(rng.uniform(0.05, 1.0), 2.0);
    double s_off = u.dot(x);
    Vec foot = x - s_off * u;
    auto chord = superlevel_chord(f, foot, u, y);
    if (!chord) continue;
    double half = 0.5 * (chord->second - chord->first);
    SymmetralPoint sp;
    sp.base = LiftedPoint{foot, y};
    sp.offset = rng.uniform(-half, half);
    pts.push_back(sp);
  }
  MacbeathTriple triple = macbeath_pair(f, H, pts);
  double avg = 0.5 * (triple.massQ.value + triple.massR.value);
  double bounds = triple.massP.errorBound + 0.5 * (triple.massQ.errorBound +
                                                   triple.massR.errorBound);
  bool ok = triple.massP.value <= avg + 1e-9 + bounds;

  ExperimentRow row;
  row.experiment = spec.command;
  row.function_id = spec.function_id;
  row.alpha = alpha_as_double(f.alpha());
  row.n = f.dim();
  row.N = wanted;
  row.seed = spec.seed;
  row.J_f = total_mass(f).value;
  row.bestmass_f = triple.massP.value;
  row.bestmass_fstar = avg;
  row.gap = bounds;
  row.certificate_ok = ok;
  res.rows.push_back(row);
  json log;
  log["J_p"] = triple.massP.value;
  log["J_q"] = triple.massQ.value;
  log["J_r"] = triple.massR.value;
  log["normal"] = std::vector<double>(u.data(), u.data() + f.dim());
  res.log_json = log.dump();
  res.certificates_ok = ok;
  return res;
}

ExperimentResult run_steiner_chain(const ExperimentSpec& spec, const AlphaConcaveFunction& f,
                                   const std::string& out_dir) {
  ExperimentResult res;
  auto hyperplanes = random_hyperplane_sequence(spec.seed, f.dim(), spec.steps);
  ChainResult chain = symmetrization_chain(f, hyperplanes, true, spec.resolution);
  MassResult J = total_mass(f);
  double final_dist = chain.l1_to_rearrangement.empty() ? 0.0
                                                        : chain.l1_to_rearrangement.back();
  bool trend_ok = true;
  for (std::size_t i = 1; i < chain.l1_to_rearrangement.size(); ++i)
    trend_ok = trend_ok && chain.l1_to_rearrangement[i] <=
                               chain.l1_to_rearrangement[i - 1] + 1e-3 * J.value;
  bool ok = final_dist < 0.01 * J.value && trend_ok;

  ExperimentRow row;
  row.experiment = spec.command;
  row.function_id = spec.function_id;
  row.alpha = alpha_as_double(f.alpha());
  row.n = f.dim();
  row.N = spec.steps;
  row.seed = spec.seed;
  row.J_f = J.value;
  row.J_fstar = total_mass(rearrange(f)).value;
  row.gap = final_dist;
  row.certificate_ok = ok;
  res.rows.push_back(row);
  json log;
  log["l1_distances"] = chain.l1_to_rearrangement;
  log["final_distance"] = final_dist;
  log["trend_ok"] = trend_ok;
  res.log_json = log.dump();
  res.certificates_ok = ok;
  if (spec.plot && !chain.l1_to_rearrangement.empty()) {
    std::vector<std::pair<double, double>> series;
    for (std::size_t i = 0; i < chain.l1_to_rearrangement.size(); ++i)
      series.emplace_back(static_cast<double>(i + 1), chain.l1_to_rearrangement[i]);
    emit_plot(series, out_dir + "/" + spec.function_id + "_chain.svg",
              "L1 distance to the rearrangement per step");
  }
  if (!spec.output.empty()) write_function_artifact(chain.final, spec.output, spec.resolution);
  return res;
}

ExperimentResult run_minorant(const ExperimentSpec& spec, const AlphaConcaveFunction& f,
                              const std::string& out_dir) {
  ExperimentResult res;
  MinorantSolution sol = best_minorant(f, spec.N, spec.optimizer);
  MassResult J = total_mass(f);
  bool ok = sol.mass.value <= J.value + J.errorBound + sol.mass.errorBound;

  ExperimentRow row;
  row.experiment = spec.command;
  row.function_id = spec.function_id;
  row.alpha = alpha_as_double(f.alpha());
  row.n = f.dim();
  row.N = spec.N;
  row.seed = spec.seed;
  row.J_f = J.value;
  row.bestmass_f = sol.mass.value;
  row.G_f = J.value - sol.mass.value;
  row.gap = sol.optimizerGap;
  row.certificate_ok = ok;
  res.rows.push_back(row);
  res.log_json = sol.to_json();
  res.certificates_ok = ok;
  if (spec.dump_minorant) {
    std::string path = spec.output.empty()
                           ? out_dir + "/" + spec.function_id + "_minorant.json"
                           : spec.output;
    std::ofstream out(path);
    out << sol.to_json();
  }
  return res;
}

ExperimentResult run_rearrange(const ExperimentSpec& spec, const AlphaConcaveFunction& f) {
  ExperimentResult res;
  AlphaConcaveFunction star = rearrange(f);
  MassResult J = total_mass(f);
  MassResult Jstar = total_mass(star);
  double slack = J.errorBound + Jstar.errorBound + 1e-4 * std::abs(J.value);
  bool ok = std::abs(J.value - Jstar.value) <= slack;

  ExperimentRow row;
  row.experiment = spec.command;
  row.function_id = spec.function_id;
  row.alpha = alpha_as_double(f.alpha());
  row.n = f.dim();
  row.N = spec.N;
  row.seed = spec.seed;
  row.J_f = J.value;
  row.J_fstar = Jstar.value;
  row.gap = std::abs(J.value - Jstar.value);
  row.certificate_ok = ok;
  res.rows.push_back(row);
  json log;
  log["rearranged"] = json::parse(function_to_json_text(star));
  res.log_json = log.dump();
  res.certificates_ok = ok;
  if (!spec.output.empty()) write_function_artifact(star, spec.output, spec.resolution);
  return res;
}

ExperimentResult run_symmetrize(const ExperimentSpec& spec, const AlphaConcaveFunction& f) {
  ExperimentResult res;
  Vec normal;
  if (spec.normal.empty()) {
    normal = f.dim() == 1 ? vec1(1.0) : vec2(1.0, 0.0);
  } else {
    normal.resize(f.dim());
    for (int a = 0; a < f.dim(); ++a) normal[a] = spec.normal.at(a);
  }
  Hyperplane H = Hyperplane::from_normal(normal);
  AlphaConcaveFunction sym = steiner_symmetrize(f, H, spec.resolution);
  MassResult J = total_mass(f);
  MassResult Jsym = total_mass(sym);
  double slack = J.errorBound + Jsym.errorBound + 1e-4 * std::abs(J.value);
  bool ok = std::abs(J.value - Jsym.value) <= slack;

  ExperimentRow row;
  row.experiment = spec.command;
  row.function_id = spec.function_id;
  row.alpha = alpha_as_double(f.alpha());
  row.n = f.dim();
  row.N = spec.N;
  row.seed = spec.seed;
  row.J_f = J.value;
  row.J_fstar = Jsym.value;
  row.gap = std::abs(J.value - Jsym.value);
  row.certificate_ok = ok;
  res.rows.push_back(row);
  json log;
  log["normal"] = std::vector<double>(H.normal.data(), H.normal.data() + f.dim());
  res.log_json = log.dump();
  res.certificates_ok = ok;
  if (!spec.output.empty()) write_function_artifact(sym, spec.output, spec.resolution);
  return res;
}

ExperimentResult run_recover_macbeath(const ExperimentSpec& spec, const AlphaConcaveFunction& f,
                                      const std::string& out_dir) {
  ExperimentResult res;
  std::vector<int> sweep = spec.sweepN.empty() ? std::vector<int>{4, 5, 6, 7, 8} : spec.sweepN;
  json log;
  json entries = json::array();
  std::vector<std::pair<double, double>> series;
  bool all_ok = true;
  MassResult J = total_mass(f);
  const auto* ball = std::get_if<BallIndicatorBase>(&f.base());
  double prev_mass = -kInf;
  for (int N : sweep) {
    OptimizerConfig cfg = spec.optimizer;
    cfg.symmetricAnsatz = cfg.symmetricAnsatz || f.is_radial();
    MinorantSolution sol = best_minorant(f, N, cfg);
    double G = J.value - sol.mass.value;
    bool ok = sol.mass.value >= prev_mass - sol.optimizerGap;  // monotone in N
    prev_mass = std::max(prev_mass, sol.mass.value);
    double oracle = std::nan("");
    if (ball) {
      // inscribed regular N-gon of the ball
      double R = ball->radius;
      oracle = J.value - f.max_value() * (N / 2.0) * R * R * std::sin(2.0 * M_PI / N);
      ok = ok && std::abs(G - oracle) <= 1e-3 * std::max(1.0, J.value);
    }
    all_ok = all_ok && ok;
    ExperimentRow row;
    row.experiment = spec.command;
    row.function_id = spec.function_id;
    row.alpha = alpha_as_double(f.alpha());
    row.n = f.dim();
    row.N = N;
    row.seed = spec.seed;
    row.J_f = J.value;
    row.bestmass_f = sol.mass.value;
    row.G_f = G;
    row.G_fstar = oracle;
    row.gap = sol.optimizerGap;
    row.certificate_ok = ok;
    res.rows.push_back(row);
    entries.push_back({{"N", N}, {"G", G}, {"oracle", oracle}, {"gap", sol.optimizerGap}});
    series.emplace_back(static_cast<double>(N), G);
  }
  log["sweep"] = entries;
  res.log_json = log.dump();
  res.certificates_ok = all_ok;
  if (spec.plot)
    emit_plot(series, out_dir + "/" + spec.function_id + "_g_vs_n.svg",
              "approximation defect vs break points");
  return res;
}

}  // namespace

AlphaConcaveFunction resolve_function(const ExperimentSpec& spec) {
  AlphaConcaveFunction f = spec.function_id == "inline"
                               ? function_from_json_text(spec.function_json)
                               : catalog_function(spec.function_id);
  if (spec.alpha_override) {
    AlphaParam a = std::isnan(*spec.alpha_override) ? AlphaParam::infinity()
                                                    : AlphaParam::finite(*spec.alpha_override);
    f = function_of_base(a, f.base());
    f.set_name(spec.function_id);
  }
  return f;
}

ExperimentResult run(const ExperimentSpec& spec) { return run_with_outdir(spec, "."); }

ExperimentResult run_with_outdir(const ExperimentSpec& spec, const std::string& out_dir) {
  AlphaConcaveFunction f = resolve_function(spec);
  if (spec.command == "verify-theorem") return run_verify_theorem(spec, f);
  if (spec.command == "macbeath-pair") return run_macbeath_pair(spec, f);
  if (spec.command == "steiner-chain") return run_steiner_chain(spec, f, out_dir);
  if (spec.command == "minorant") return run_minorant(spec, f, out_dir);
  if (spec.command == "rearrange") return run_rearrange(spec, f);
  if (spec.command == "symmetrize") return run_symmetrize(spec, f);
  if (spec.command == "recover-macbeath") return run_recover_macbeath(spec, f, out_dir);
  throw std::invalid_argument("unknown command '" + spec.command + "'");
}

std::string ExperimentRow::csv_header() {
  return "experiment,function_id,alpha,n,N,J_f,J_fstar,bestmass_f,bestmass_fstar,G_f,G_fstar,"
         "gap,certificate_ok,seed";
}

std::string ExperimentRow::csv() const {
  std::string s;
  s += experiment + "," + function_id + ",";
  s += g17(alpha) + "," + std::to_string(n) + "," + std::to_string(N) + ",";
  s += g17(J_f) + "," + g17(J_fstar) + "," + g17(bestmass_f) + "," + g17(bestmass_fstar) + ",";
  s += g17(G_f) + "," + g17(G_fstar) + "," + g17(gap) + ",";
  s += (certificate_ok ? "true" : "false");
  s += "," + std::to_string(seed);
  return s;
}

BatchResult run_batch(const std::vector<ExperimentSpec>& specs, const std::string& out_dir,
                      unsigned jobs) {
  std::filesystem::create_directories(out_dir);
  std::vector<ExperimentResult> results(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) { results[i] = run_with_outdir(specs[i], out_dir); },
               jobs);

  BatchResult batch;
  std::string csv = ExperimentRow::csv_header() + "\n";
  json log = json::object();
  json entries = json::array();
  bool all_ok = true;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (const auto& row : results[i].rows) csv += row.csv() + "\n";
    json e;
    e["command"] = specs[i].command;
    e["function"] = specs[i].function_id;
    e["details"] = json::parse(results[i].log_json.empty() ? "{}" : results[i].log_json);
    entries.push_back(e);
    all_ok = all_ok && results[i].certificates_ok;
  }
  auto now = std::chrono::system_clock::now().time_since_epoch();
  log["timestamp_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  log["experiments"] = entries;
  batch.csv = csv;
  batch.log_json = log.dump(2);
  batch.exit_code = all_ok ? 0 : 2;

  std::ofstream csv_out(out_dir + "/results.csv");
  csv_out << csv;
  std::ofstream log_out(out_dir + "/results.json");
  log_out << batch.log_json;
  return batch;
}

std::vector<ExperimentSpec> specs_from_config_text(const std::string& text) {
  json cfg = json::parse(text);
  std::vector<json> entries;
  if (cfg.contains("experiments")) {
    for (const auto& e : cfg.at("experiments")) entries.push_back(e);
  } else {
    entries.push_back(cfg);
  }
  std::vector<ExperimentSpec> specs;
  for (const auto& e : entries) {
    ExperimentSpec s;
    s.command = e.value("command", "");
    if (e.contains("function")) {
      const json& fn = e.at("function");
      if (fn.is_string()) {
        s.function_id = fn.get<std::string>();
      } else {
        s.function_id = "inline";
        s.function_json = fn.dump();
      }
    }
    s.N = e.value("N", 4);
    if (e.contains("alpha"))
      s.alpha_override = e.at("alpha").is_string() ? std::nan("")
                                                   : e.at("alpha").get<double>();
    s.seed = e.value("seed", 1ull);
    s.steps = e.value("steps", 200);
    if (e.contains("normal")) s.normal = e.at("normal").get<std::vector<double>>();
    if (e.contains("sweepN")) s.sweepN = e.at("sweepN").get<std::vector<int>>();
    s.resolution = e.value("resolution", 513);
    s.output = e.value("output", "");
    s.plot = e.value("plot", false);
    s.dump_minorant = e.value("dump_minorant", false);
    s.optimizer.restarts = e.value("restarts", s.optimizer.restarts);
    s.optimizer.maxIterations = e.value("max_iterations", s.optimizer.maxIterations);
    s.optimizer.simplexScale = e.value("simplex_scale", s.optimizer.simplexScale);
    s.optimizer.symmetricAnsatz = e.value("symmetric_ansatz", s.optimizer.symmetricAnsatz);
    s.optimizer.seed = s.seed;
    specs.push_back(std::move(s));
  }
  return specs;
}

}  // namespace mlab
