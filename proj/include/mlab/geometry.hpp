#pragma once

#include "mlab/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <vector>

namespace mlab {

using Eigen::Vector2d;

/// Closed halfplane {x : <normal, x> <= offset}.
struct HalfPlane {
  Vector2d normal;
  double offset = 0.0;

  double signed_excess(const Vector2d& p) const { return normal.dot(p) - offset; }
};

/// Convex polygon as a CCW vertex list. An empty list is the empty set.
using Polygon = std::vector<Vector2d>;

inline double polygon_area(const Polygon& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vector2d& a = poly[i];
    const Vector2d& b = poly[(i + 1) % poly.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * std::abs(twice);
}

inline double cross2(const Vector2d& a, const Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Sutherland-Hodgman clip of a convex polygon against one halfplane.
inline Polygon clip_polygon(const Polygon& poly, const HalfPlane& hp, double eps = 1e-12) {
  Polygon out;
  const std::size_t n = poly.size();
  if (n == 0) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector2d& a = poly[i];
    const Vector2d& b = poly[(i + 1) % n];
    double da = hp.signed_excess(a);
    double db = hp.signed_excess(b);
    if (da <= eps) out.push_back(a);
    if ((da < -eps && db > eps) || (da > eps && db < -eps)) {
      double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

inline Polygon clip_polygon(Polygon poly, const std::vector<HalfPlane>& hps, double eps = 1e-12) {
  for (const auto& hp : hps) {
    poly = clip_polygon(poly, hp, eps);
    if (poly.empty()) break;
  }
  return poly;
}

inline bool point_in_polygon(const Polygon& poly, const Vector2d& p, double eps = 1e-9) {
  if (poly.size() < 3) return false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vector2d& a = poly[i];
    const Vector2d& b = poly[(i + 1) % poly.size()];
    if (cross2(b - a, p - a) < -eps * (b - a).norm()) return false;
  }
  return true;
}

/// Closest point of a convex polygon (vertices may also describe a segment or point).
inline Vector2d closest_point_in_polygon(const Polygon& poly, const Vector2d& p) {
  if (poly.empty()) throw std::invalid_argument("closest_point_in_polygon: empty polygon");
  if (point_in_polygon(poly, p, 0.0)) return p;
  Vector2d best = poly[0];
  double bestd = (p - best).squaredNorm();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vector2d& a = poly[i];
    const Vector2d& b = poly[(i + 1) % poly.size()];
    Vector2d ab = b - a;
    double len2 = ab.squaredNorm();
    Vector2d cand = a;
    if (len2 > 0.0) {
      double t = std::clamp(ab.dot(p - a) / len2, 0.0, 1.0);
      cand = a + t * ab;
    }
    double d = (p - cand).squaredNorm();
    if (d < bestd) {
      bestd = d;
      best = cand;
    }
  }
  return best;
}

/// Monotone-chain convex hull; returns CCW vertices (no duplicated endpoint).
inline Polygon convex_hull_2d(std::vector<Vector2d> pts, double eps = 1e-12) {
  std::sort(pts.begin(), pts.end(), [](const Vector2d& a, const Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [eps](const Vector2d& a, const Vector2d& b) {
                          return (a - b).norm() <= eps;
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  Polygon hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= eps) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper chain
    while (k >= t && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Parameter interval {t : p + t*d in poly} of a line against a convex polygon.
/// Empty optional when the line misses the polygon.
inline std::optional<std::pair<double, double>> line_polygon_interval(const Polygon& poly,
                                                                      const Vector2d& p,
                                                                      const Vector2d& d,
                                                                      double eps = 1e-12) {
  if (poly.size() < 2) return std::nullopt;
  double lo = -kInf, hi = kInf;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vector2d& a = poly[i];
    const Vector2d& b = poly[(i + 1) % poly.size()];
    Vector2d edge = b - a;
    Vector2d inward(-edge.y(), edge.x());  // CCW polygon: inward normal
    double denom = inward.dot(d);
    double num = inward.dot(a - p);
    if (std::abs(denom) <= eps * (1.0 + inward.norm())) {
      if (num > eps * (1.0 + inward.norm())) return std::nullopt;  // parallel, outside
    } else if (denom > 0.0) {
      lo = std::max(lo, num / denom);
    } else {
      hi = std::min(hi, num / denom);
    }
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

/// Axis-aligned box in R^n, n in {1,2}.
struct Box {
  Vec lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  Vec extent() const { return hi - lo; }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Vec& x, double eps = 0.0) const {
    for (int i = 0; i < lo.size(); ++i)
      if (x[i] < lo[i] - eps || x[i] > hi[i] + eps) return false;
    return true;
  }
  Box padded(double frac) const {
    Vec half = 0.5 * frac * (hi - lo);
    return Box{lo - half, hi + half};
  }
  Box united(const Box& other) const {
    return Box{lo.cwiseMin(other.lo), hi.cwiseMax(other.hi)};
  }
  Polygon corners() const {
    return {Vector2d(lo[0], lo[1]), Vector2d(hi[0], lo[1]), Vector2d(hi[0], hi[1]),
            Vector2d(lo[0], hi[1])};
  }
};

}  // namespace mlab
