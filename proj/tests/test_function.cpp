#include "mlab/function.hpp"

#include "mlab/catalog.hpp"
#include "mlab/rng.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace mlab;

namespace {

AlphaConcaveFunction gauss1d() { return catalog_function("gauss_1d"); }

bool functions_agree(const AlphaConcaveFunction& f, const AlphaConcaveFunction& g, int samples,
                     std::uint64_t seed, double rel = 1e-10) {
  Rng rng(seed);
  Box box = f.support_box();
  for (int i = 0; i < samples; ++i) {
    Vec x = testsupport::rand_point(rng, box);
    double a = eval(f, x), b = eval(g, x);
    if (std::abs(a - b) > rel * (1.0 + std::max(std::abs(a), std::abs(b)))) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("eval basics") {
  CHECK(eval(gauss1d(), vec1(0.0)) == doctest::Approx(1.0));
  // indicator of [-1, 2]
  PolytopeIndicatorBase seg;
  seg.vertices = {vec1(-1.0), vec1(2.0)};
  auto ind = function_of_base(AlphaParam::infinity(), seg);
  CHECK(eval(ind, vec1(3.0)) == 0.0);
  CHECK(eval(ind, vec1(0.5)) == 1.0);
  // tent (1-|x|)_+ with alpha = 1
  auto tent = catalog_function("tent_1d");
  CHECK(eval(tent, vec1(0.5)) == doctest::Approx(0.5));
  CHECK(eval(tent, vec1(2.0)) == 0.0);
}

TEST_CASE("base_of_function recovers the base") {
  auto f = gauss1d();
  const auto& base = base_of_function(f);
  CHECK(std::holds_alternative<QuadraticBase>(base));
  CHECK(base_value(f, vec1(1.5)) == doctest::Approx(2.25));

  // base of an indicator is the convex indicator for every alpha
  PolytopeIndicatorBase sq;
  sq.vertices = {vec2(-1, -1), vec2(1, -1), vec2(1, 1), vec2(-1, 1)};
  auto ind2 = function_of_base(AlphaParam::finite(2.0), sq);
  CHECK(base_value(ind2, vec2(0.2, 0.3)) == 0.0);
  CHECK(base_value(ind2, vec2(3.0, 0.0)) == kInf);
  CHECK(eval(ind2, vec2(0.2, 0.3)) == doctest::Approx(1.0));
}

TEST_CASE("function_of_base examples") {
  // alpha=0, psi=|x| -> e^{-|x|}
  auto expf = catalog_function("exp_1d_symmetric");
  CHECK(eval(expf, vec1(1.0)) == doctest::Approx(std::exp(-1.0)));
  // alpha=-1, psi=x^2 -> 1/(1+x^2)
  auto invq = catalog_function("invquad_1d");
  CHECK(eval(invq, vec1(2.0)) == doctest::Approx(1.0 / 5.0));
  // alpha=1 with the indicator base stays the indicator
  PolytopeIndicatorBase seg;
  seg.vertices = {vec1(-1.0), vec1(1.0)};
  auto ind = function_of_base(AlphaParam::finite(1.0), seg);
  CHECK(eval(ind, vec1(0.0)) == doctest::Approx(1.0));
  CHECK(eval(ind, vec1(1.5)) == 0.0);
}

TEST_CASE("superlevel set descriptors") {
  PolytopeIndicatorBase sq;
  sq.vertices = {vec2(-1, -1), vec2(1, -1), vec2(1, 1), vec2(-1, 1)};
  auto ind = function_of_base(AlphaParam::infinity(), sq);
  auto lev = superlevel_set_descriptor(ind, 0.5);
  CHECK(lev.kind == LevelSetDescriptor::Kind::Polygon);
  CHECK(lev.volume == doctest::Approx(4.0));
  CHECK(superlevel_set_descriptor(ind, 2.0).kind == LevelSetDescriptor::Kind::Empty);

  auto g = gauss1d();
  auto iv = superlevel_set_descriptor(g, std::exp(-1.0));
  CHECK(iv.kind == LevelSetDescriptor::Kind::Interval);
  CHECK(iv.a == doctest::Approx(-1.0));
  CHECK(iv.b == doctest::Approx(1.0));
}

TEST_CASE("round trip through the base transform") {
  for (const char* id : {"gauss_1d", "gauss_2d_sheared", "exp_1d_onesided", "cone_1d_asym",
                         "tent_1d_asym", "invquad_1d", "negquad_2d", "disk_unit"}) {
    auto f = catalog_function(id);
    auto g = function_of_base(f.alpha(), base_of_function(f));
    CAPTURE(id);
    CHECK(functions_agree(f, g, 1000, 77));
  }
}

TEST_CASE("alpha-concavity holds on random triples") {
  Rng rng(123);
  for (const char* id : {"gauss_1d", "gauss_2d_sheared", "exp_1d_onesided", "tent_1d_asym",
                         "invquad_1d", "negquad_2d"}) {
    auto f = catalog_function(id);
    Box box = f.support_box();
    int checked = 0;
    for (int i = 0; i < 2000 && checked < 500; ++i) {
      Vec x = testsupport::rand_point(rng, box);
      Vec y = testsupport::rand_point(rng, box);
      double lam = rng.uniform(0.0, 1.0);
      double fx = eval(f, x), fy = eval(f, y);
      if (!(fx > 0.0) || !(fy > 0.0)) continue;
      double mid = eval(f, lam * x + (1.0 - lam) * y);
      double bound = alpha_mean(f.alpha(), lam, 1.0 - lam, fx, fy);
      CAPTURE(id);
      CHECK(mid >= bound - 1e-10 * (1.0 + bound));
      ++checked;
    }
    CHECK(checked > 100);
  }
}

TEST_CASE("nesting: alpha2-concave implies alpha1-concave for alpha1 < alpha2") {
  Rng rng(321);
  auto f = catalog_function("tent_1d_asym");  // 1-concave
  Box box = f.support_box();
  for (double a1 : {-0.5, 0.0, 0.5}) {
    AlphaParam alpha1 = AlphaParam::finite(a1);
    for (int i = 0; i < 300; ++i) {
      Vec x = testsupport::rand_point(rng, box);
      Vec y = testsupport::rand_point(rng, box);
      double lam = rng.uniform(0.0, 1.0);
      double fx = eval(f, x), fy = eval(f, y);
      if (!(fx > 0.0) || !(fy > 0.0)) continue;
      double mid = eval(f, lam * x + (1.0 - lam) * y);
      CHECK(mid >= alpha_mean(alpha1, lam, 1.0 - lam, fx, fy) - 1e-10);
    }
  }
}

TEST_CASE("construction rejects invalid inputs") {
  // alpha < 0 with too-slow decay: n=2, alpha=-1 gives n|alpha| = 2
  QuadraticBase q2;
  q2.Q = Mat::Identity(2, 2);
  q2.center = vec2(0, 0);
  CHECK_THROWS_AS(function_of_base(AlphaParam::finite(-1.0), q2), std::invalid_argument);
  // alpha < 0 requires a quadratic base
  ConeBase c;
  c.center = vec1(0.0);
  c.gradients = {vec1(1.0), vec1(-1.0)};
  CHECK_THROWS_AS(function_of_base(AlphaParam::finite(-0.5), c), std::invalid_argument);
  // origin outside the body is rejected at ingestion
  PolytopeIndicatorBase p;
  p.vertices = {vec2(1, 1), vec2(2, 1), vec2(1, 2)};
  CHECK_THROWS_AS(function_of_base(AlphaParam::infinity(), p), std::invalid_argument);
  // non-coercive cone (one-sided gauge on an unbounded domain)
  ConeBase bad;
  bad.center = vec1(0.0);
  bad.gradients = {vec1(1.0)};
  CHECK_THROWS_AS(function_of_base(AlphaParam::finite(0.0), bad), std::invalid_argument);
  // alpha = inf needs an indicator base
  QuadraticBase q1;
  q1.Q = Mat::Identity(1, 1);
  q1.center = vec1(0.0);
  CHECK_THROWS_AS(function_of_base(AlphaParam::infinity(), q1), std::invalid_argument);
}

TEST_CASE("support boxes cover the mass") {
  // heavy polynomial tails (alpha < 0) still keep the bound well under the
  // 1e-4 relative budget used by mass-conservation checks
  for (const char* id : {"gauss_1d_shifted", "exp_1d_onesided", "cone_2d_skew", "negquad_2d"}) {
    auto f = catalog_function(id);
    CAPTURE(id);
    CHECK(f.tail_mass_bound() < 1e-4);
    Box box = f.support_box();
    double edge = eval(f, box.hi);
    CHECK(edge <= 1e-9 * f.max_value());
  }
}

TEST_CASE("grid function IO round trips") {
  Box box;
  box.lo = vec2(-1.0, -2.0);
  box.hi = vec2(1.5, 2.0);
  std::vector<double> vals(5 * 7);
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = 0.1 * static_cast<double>(i);
  GridFunction g(box, {5, 7}, vals, 1e-9);
  g.save_binary("roundtrip.grid");
  GridFunction g2 = GridFunction::load_binary("roundtrip.grid");
  CHECK(g2.values() == g.values());
  CHECK(g2.box().lo[1] == doctest::Approx(-2.0));
  GridFunction g3 = GridFunction::from_json(g.to_json());
  CHECK(g3.values() == g.values());
  CHECK(g3.resolution() == g.resolution());
}

TEST_CASE("minorant wrapping as a function") {
  auto f = gauss1d();
  std::vector<HypoPoint> pts = {{vec1(-1.0), eval(f, vec1(-1.0))},
                                {vec1(0.0), 1.0},
                                {vec1(1.0), eval(f, vec1(1.0))}};
  AlphaMinorant q = alpha_minorant_from_points(f, pts);
  auto qf = minorant_as_function(q);
  CHECK(eval(qf, vec1(0.5)) == doctest::Approx(minorant_eval(q, vec1(0.5))));
  CHECK(eval(qf, vec1(3.0)) == 0.0);
}

TEST_CASE("minorant construction validates heights") {
  auto f = gauss1d();
  CHECK_THROWS_AS(alpha_minorant_from_points(f, {{vec1(0.0), 1.5}}), PointAboveGraphError);
  CHECK_THROWS_AS(alpha_minorant_from_points(f, {{vec1(0.0), 0.0}}), ZeroHeightError);
  // single point on the graph: degenerate minorant supported on one point
  AlphaMinorant q = alpha_minorant_from_points(f, {{vec1(0.5), 0.5}});
  CHECK(q.lin.degenerate);
  CHECK(minorant_eval(q, vec1(0.5)) == doctest::Approx(0.5));
  CHECK(minorant_eval(q, vec1(0.6)) == 0.0);
}

TEST_CASE("minorants stay below the graph") {
  Rng rng(5);
  for (const char* id : {"gauss_1d", "gauss_2d_sheared", "tent_1d_asym", "invquad_1d"}) {
    auto f = catalog_function(id);
    Box box = f.support_box();
    std::vector<HypoPoint> pts;
    for (int i = 0; i < 5; ++i) {
      Vec x = testsupport::rand_point(rng, box);
      double fx = eval(f, x);
      if (!(fx > 0.0)) continue;
      pts.push_back({x, fx * rng.uniform(0.2, 1.0)});
    }
    if (pts.empty()) continue;
    AlphaMinorant q = alpha_minorant_from_points(f, pts);
    for (int i = 0; i < 1000; ++i) {
      Vec x = testsupport::rand_point(rng, box);
      CAPTURE(id);
      CHECK(minorant_eval(q, x) <= eval(f, x) * (1.0 + 1e-9) + 1e-12);
    }
  }
}
