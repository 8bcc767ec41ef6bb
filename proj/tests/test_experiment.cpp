#include "mlab/experiment.hpp"

#include "mlab/svg.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace mlab;

namespace {

ExperimentSpec quick_spec(const std::string& command, const std::string& fn, int N = 4) {
  ExperimentSpec s;
  s.command = command;
  s.function_id = fn;
  s.N = N;
  s.seed = 7;
  s.optimizer.seed = 7;
  s.optimizer.restarts = 8;
  s.optimizer.maxIterations = 300;
  s.resolution = 257;
  return s;
}

}  // namespace

TEST_CASE("verify-theorem on the unit square is exact") {
  auto res = run(quick_spec("verify-theorem", "square_unit", 4));
  REQUIRE(res.rows.size() == 1);
  const auto& row = res.rows[0];
  CHECK(row.certificate_ok);
  CHECK(std::abs(row.G_f) <= row.gap + 1e-9);
  CHECK(row.bestmass_f == doctest::Approx(row.J_f).epsilon(1e-9));
}

TEST_CASE("rows are byte-identical across reruns with the same seed") {
  auto a = run(quick_spec("verify-theorem", "gauss_1d_shifted", 3));
  auto b = run(quick_spec("verify-theorem", "gauss_1d_shifted", 3));
  REQUIRE(a.rows.size() == b.rows.size());
  CHECK(a.rows[0].csv() == b.rows[0].csv());
}

TEST_CASE("macbeath-pair command certifies the averaged masses") {
  auto res = run(quick_spec("macbeath-pair", "gauss_2d_sheared", 4));
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].certificate_ok);
  CHECK(res.rows[0].bestmass_f <= res.rows[0].bestmass_fstar + res.rows[0].gap + 1e-9);
}

TEST_CASE("rearrange and symmetrize commands conserve mass") {
  auto r1 = run(quick_spec("rearrange", "tri_2d_skewed"));
  CHECK(r1.rows[0].certificate_ok);
  CHECK(r1.rows[0].J_f == doctest::Approx(r1.rows[0].J_fstar).epsilon(1e-9));
  auto spec = quick_spec("symmetrize", "gauss_2d_asym");
  spec.normal = {0.6, 0.8};
  auto r2 = run(spec);
  CHECK(r2.rows[0].certificate_ok);
}

TEST_CASE("steiner-chain command records a decreasing trend") {
  auto spec = quick_spec("steiner-chain", "gauss_2d_asym");
  spec.steps = 15;
  auto res = run(spec);
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].certificate_ok);
  CHECK(res.rows[0].gap < 0.01 * res.rows[0].J_f);  // final L1 distance
}

TEST_CASE("minorant command artifacts") {
  auto spec = quick_spec("minorant", "tent_1d", 3);
  spec.dump_minorant = true;
  spec.output = "minorant_dump_test.json";
  auto res = run(spec);
  CHECK(res.rows[0].certificate_ok);
  std::ifstream in("minorant_dump_test.json");
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("break_points") != std::string::npos);
  std::remove("minorant_dump_test.json");
}

TEST_CASE("recover-macbeath sweep on the disk") {
  auto spec = quick_spec("recover-macbeath", "disk_unit");
  spec.sweepN = {4, 6};
  spec.optimizer.symmetricAnsatz = true;
  auto res = run(spec);
  REQUIRE(res.rows.size() == 2);
  for (const auto& row : res.rows) {
    CHECK(row.certificate_ok);
    CHECK(std::abs(row.G_f - row.G_fstar) <= 1e-3 * std::max(1.0, row.J_f));
  }
  CHECK(res.rows[1].G_f < res.rows[0].G_f);  // defect shrinks with N
}

TEST_CASE("batch runner writes results and reports exit codes") {
  std::vector<ExperimentSpec> specs = {quick_spec("verify-theorem", "square_unit", 4),
                                       quick_spec("rearrange", "gauss_1d_shifted")};
  auto batch = run_batch(specs, "batch_test_out", 2);
  CHECK(batch.exit_code == 0);
  CHECK(batch.csv.find("experiment,function_id,alpha") == 0);
  // one header + two rows
  int lines = 0;
  for (char c : batch.csv)
    if (c == '\n') ++lines;
  CHECK(lines == 3);
  CHECK(std::filesystem::exists("batch_test_out/results.csv"));
  CHECK(std::filesystem::exists("batch_test_out/results.json"));
  // timestamps live in the JSON log only
  CHECK(batch.csv.find("timestamp") == std::string::npos);
  CHECK(batch.log_json.find("timestamp_ms") != std::string::npos);
  std::filesystem::remove_all("batch_test_out");
}

TEST_CASE("config parsing") {
  std::string cfg = R"({
    "experiments": [
      {"command": "minorant", "function": "tent_1d", "N": 3, "seed": 11},
      {"command": "rearrange",
       "function": {"alpha": 0.0, "kind": "quadratic", "dim": 1, "params": {"center": [0.3]}}}
    ]
  })";
  auto specs = specs_from_config_text(cfg);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].command == "minorant");
  CHECK(specs[0].N == 3);
  CHECK(specs[0].seed == 11);
  CHECK(specs[1].function_id == "inline");
  auto f = resolve_function(specs[1]);
  CHECK(f.dim() == 1);
  CHECK(eval(f, vec1(0.3)) == doctest::Approx(1.0));
}

TEST_CASE("unknown ids and commands are usage errors") {
  CHECK_THROWS_AS(run(quick_spec("verify-theorem", "no_such_function")),
                  std::invalid_argument);
  CHECK_THROWS_AS(run(quick_spec("no-such-command", "gauss_1d")), std::invalid_argument);
}

TEST_CASE("alpha override") {
  auto spec = quick_spec("rearrange", "tent_1d");
  spec.alpha_override = 0.5;  // a 1-concave tent is also 0.5-concave
  auto f = resolve_function(spec);
  CHECK(f.alpha().value() == 0.5);
}

TEST_CASE("plots are deterministic and reject empty series") {
  std::vector<std::pair<double, double>> series = {{0, 1}, {1, 0.5}, {2, 0.3}};
  emit_plot(series, "plot_a.svg", "test");
  emit_plot(series, "plot_b.svg", "test");
  std::ifstream a("plot_a.svg"), b("plot_b.svg");
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(sa.find("<polyline") != std::string::npos);
  CHECK_THROWS_AS(emit_plot({}, "plot_c.svg"), std::invalid_argument);
  CHECK(!std::filesystem::exists("plot_c.svg"));
  std::remove("plot_a.svg");
  std::remove("plot_b.svg");
}

TEST_CASE("catalog functions all construct and integrate") {
  for (const auto& id : catalog_ids()) {
    CAPTURE(id);
    auto f = catalog_function(id);
    MassResult J = total_mass(f);
    CHECK(J.value > 0.0);
    CHECK(std::isfinite(J.value));
    // serialization round trip preserves values at a few probe points
    auto g = function_from_json_text(function_to_json_text(f));
    for (double t : {0.25, 0.75}) {
      Vec x = f.support_box().lo + t * (f.support_box().hi - f.support_box().lo);
      CHECK(eval(g, x) == doctest::Approx(eval(f, x)).epsilon(1e-9));
    }
  }
}
