#include "mlab/geometry.hpp"

#include "mlab/rng.hpp"

#include <doctest.h>

using namespace mlab;

TEST_CASE("polygon area and clipping") {
  Polygon square = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  CHECK(polygon_area(square) == doctest::Approx(4.0));
  // clip to x <= 1
  Polygon half = clip_polygon(square, HalfPlane{{1.0, 0.0}, 1.0});
  CHECK(polygon_area(half) == doctest::Approx(2.0));
  // clip away everything
  CHECK(clip_polygon(square, HalfPlane{{1.0, 0.0}, -1.0}).empty());
}

TEST_CASE("convex hull of noisy square") {
  std::vector<Eigen::Vector2d> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.7}};
  Polygon hull = convex_hull_2d(pts);
  CHECK(hull.size() == 4);
  CHECK(polygon_area(hull) == doctest::Approx(1.0));
}

TEST_CASE("line-polygon interval") {
  Polygon tri = {{0, 0}, {2, 0}, {0, 2}};
  auto iv = line_polygon_interval(tri, Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(1.0, 0.0));
  REQUIRE(iv.has_value());
  CHECK(iv->first == doctest::Approx(-0.5));
  CHECK(iv->second == doctest::Approx(1.0));
  CHECK(!line_polygon_interval(tri, Eigen::Vector2d(0.0, 5.0), Eigen::Vector2d(1.0, 0.0)));
}

TEST_CASE("closest point in polygon") {
  Polygon tri = {{0, 0}, {2, 0}, {0, 2}};
  Eigen::Vector2d inside(0.5, 0.5);
  CHECK((closest_point_in_polygon(tri, inside) - inside).norm() == doctest::Approx(0.0));
  Eigen::Vector2d out(3.0, 3.0);
  Eigen::Vector2d proj = closest_point_in_polygon(tri, out);
  CHECK(proj.x() == doctest::Approx(1.0));
  CHECK(proj.y() == doctest::Approx(1.0));
}

TEST_CASE("clip of random polygons never grows area") {
  Rng rng(42);
  for (int it = 0; it < 200; ++it) {
    std::vector<Eigen::Vector2d> pts;
    for (int k = 0; k < 8; ++k)
      pts.emplace_back(rng.uniform(-2, 2), rng.uniform(-2, 2));
    Polygon poly = convex_hull_2d(pts);
    if (poly.size() < 3) continue;
    Eigen::Vector2d n(rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (n.norm() < 1e-3) continue;
    Polygon clipped = clip_polygon(poly, HalfPlane{n, rng.uniform(-1, 1)});
    CHECK(polygon_area(clipped) <= polygon_area(poly) + 1e-12);
  }
}
