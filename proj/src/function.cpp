#include "mlab/function.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mlab {

namespace {

constexpr double kTailValueFraction = 1e-12;  // support box cuts where f < fmax * this

int base_dim(const BaseFunction& base) {
  if (auto* q = std::get_if<QuadraticBase>(&base)) return static_cast<int>(q->center.size());
  if (auto* c = std::get_if<ConeBase>(&base)) return static_cast<int>(c->center.size());
  if (auto* r = std::get_if<RadialConeBase>(&base)) return r->dim;
  if (auto* p = std::get_if<PolytopeIndicatorBase>(&base))
    return p->vertices.empty() ? 0 : static_cast<int>(p->vertices[0].size());
  if (auto* b = std::get_if<BallIndicatorBase>(&base)) return b->dim;
  if (auto* w = std::get_if<PiecewiseAffineBase>(&base)) return w->lin->dim;
  if (auto* g = std::get_if<GridBase>(&base)) return g->grid->dim();
  if (auto* r = std::get_if<RadialProfileBase>(&base)) return r->dim;
  throw std::logic_error("base_dim: unhandled kind");
}

double quad_eval(const QuadraticBase& q, const Vec& x) {
  Vec r = x - q.center;
  return r.dot(q.Q * r) + q.offset;
}

double cone_gauge(const ConeBase& c, const Vec& x) {
  double m = -kInf;
  for (const auto& g : c.gradients) m = std::max(m, g.dot(x - c.center));
  return m;
}

bool cone_in_domain(const ConeBase& c, const Vec& x, double tol = 1e-12) {
  for (const auto& h : c.domain) {
    double scale = 1.0 + std::abs(h.offset) + x.cwiseAbs().sum();
    if (h.normal.dot(x) > h.offset + tol * scale) return false;
  }
  return true;
}

double cone_eval(const ConeBase& c, const Vec& x) {
  if (!cone_in_domain(c, x)) return kInf;
  return c.offset + cone_gauge(c, x);
}

// ----- sublevel region {psi <= s} per kind ---------------------------------

struct Interval {
  double lo = kInf, hi = -kInf;
  bool empty() const { return lo > hi; }
  double length() const { return empty() ? 0.0 : hi - lo; }
};

Interval cone_sublevel_interval(const ConeBase& c, double s) {
  Interval iv{-kInf, kInf};
  double rhs = s - c.offset;
  for (const auto& g : c.gradients) {
    double gv = g[0];
    if (gv > 0.0)
      iv.hi = std::min(iv.hi, c.center[0] + rhs / gv);
    else if (gv < 0.0)
      iv.lo = std::max(iv.lo, c.center[0] + rhs / gv);
    else if (rhs < 0.0)
      return Interval{};
  }
  for (const auto& h : c.domain) {
    double a = h.normal[0];
    if (a > 0.0)
      iv.hi = std::min(iv.hi, h.offset / a);
    else if (a < 0.0)
      iv.lo = std::max(iv.lo, h.offset / a);
    else if (h.offset < 0.0)
      return Interval{};
  }
  if (iv.lo > iv.hi) return Interval{};
  return iv;
}

std::vector<HalfPlane> cone_sublevel_halfplanes(const ConeBase& c, double s) {
  std::vector<HalfPlane> hps;
  double rhs = s - c.offset;
  for (const auto& g : c.gradients) {
    Eigen::Vector2d n(g[0], g[1]);
    hps.push_back({n, rhs + n.dot(Eigen::Vector2d(c.center[0], c.center[1]))});
  }
  for (const auto& h : c.domain)
    hps.push_back({Eigen::Vector2d(h.normal[0], h.normal[1]), h.offset});
  return hps;
}

// Two-stage clip: rough extent from a huge seed box, then a fresh clip at the
// right scale so intersection points stay accurate.
Polygon cone_sublevel_polygon(const ConeBase& c, double s, bool* bounded = nullptr) {
  auto hps = cone_sublevel_halfplanes(c, s);
  Eigen::Vector2d ctr(c.center[0], c.center[1]);
  double R = 1e7 * (1.0 + std::abs(s - c.offset) + ctr.norm());
  Polygon seed = {ctr + Eigen::Vector2d(-R, -R), ctr + Eigen::Vector2d(R, -R),
                  ctr + Eigen::Vector2d(R, R), ctr + Eigen::Vector2d(-R, R)};
  Polygon rough = clip_polygon(seed, hps);
  if (bounded) *bounded = true;
  if (rough.empty()) return rough;
  double ext = 0.0;
  for (const auto& v : rough) ext = std::max(ext, (v - ctr).lpNorm<Eigen::Infinity>());
  if (ext > 0.99 * R) {
    if (bounded) {
      *bounded = false;
      return rough;
    }
    throw std::invalid_argument("cone base: unbounded sublevel set (non-coercive)");
  }
  double R2 = 2.0 * ext + 1e-9;
  Polygon seed2 = {ctr + Eigen::Vector2d(-R2, -R2), ctr + Eigen::Vector2d(R2, -R2),
                   ctr + Eigen::Vector2d(R2, R2), ctr + Eigen::Vector2d(-R2, R2)};
  return clip_polygon(seed2, hps);
}

// Smallest s with nonempty sublevel, located by bisection.
std::pair<double, Vec> cone_minimum(const ConeBase& c) {
  const int n = static_cast<int>(c.center.size());
  if (cone_in_domain(c, c.center) && cone_gauge(c, c.center) <= 0.0)
    return {c.offset + cone_gauge(c, c.center), c.center};
  double gmax = 0.0;
  for (const auto& g : c.gradients) gmax = std::max(gmax, g.norm());
  double span = 1.0 + c.center.norm();
  if (n == 1) {
    Interval probe = cone_sublevel_interval(c, c.offset + 10.0 * gmax * span + 10.0);
    if (!probe.empty() && (!std::isfinite(probe.lo) || !std::isfinite(probe.hi)))
      throw std::invalid_argument("cone base: unbounded sublevel set (non-coercive)");
    span += probe.empty() ? 0.0 : std::max(std::abs(probe.lo), std::abs(probe.hi));
  } else {
    Polygon probe = cone_sublevel_polygon(c, c.offset + 10.0 * gmax * span + 10.0);
    for (const auto& v : probe) span = std::max(span, v.norm());
  }
  double lo = c.offset - gmax * span - 1.0;
  double hi = c.offset + 10.0 * gmax * span + 10.0;
  auto nonempty = [&](double s) {
    if (n == 1) return !cone_sublevel_interval(c, s).empty();
    return !cone_sublevel_polygon(c, s).empty();
  };
  if (!nonempty(hi)) throw std::invalid_argument("cone base: empty domain");
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    if (nonempty(mid))
      hi = mid;
    else
      lo = mid;
  }
  Vec arg;
  if (n == 1) {
    Interval iv = cone_sublevel_interval(c, hi);
    arg = vec1(0.5 * (iv.lo + iv.hi));
  } else {
    Polygon poly = cone_sublevel_polygon(c, hi);
    Eigen::Vector2d ctr = Eigen::Vector2d::Zero();
    for (const auto& v : poly) ctr += v;
    if (!poly.empty()) ctr /= static_cast<double>(poly.size());
    arg = vec2(ctr.x(), ctr.y());
  }
  return {hi, arg};
}

double polygon_of(const PolytopeIndicatorBase& p, Polygon& out) {
  out.clear();
  for (const auto& v : p.vertices) out.emplace_back(v[0], v[1]);
  out = convex_hull_2d(out);
  return polygon_area(out);
}

// PWA sublevel {p <= s}.
Interval pwa_sublevel_interval_1d(const InnerLinearization& lin, double s) {
  Interval iv;
  const auto& bp = lin.breakPoints;
  for (std::size_t i = 0; i < bp.size(); ++i) {
    if (bp[i].t <= s) {
      iv.lo = std::min(iv.lo, bp[i].x[0]);
      iv.hi = std::max(iv.hi, bp[i].x[0]);
    }
    if (i + 1 < bp.size()) {
      double t0 = bp[i].t, t1 = bp[i + 1].t;
      if ((t0 - s) * (t1 - s) < 0.0) {
        double w = (s - t0) / (t1 - t0);
        double xc = bp[i].x[0] + w * (bp[i + 1].x[0] - bp[i].x[0]);
        iv.lo = std::min(iv.lo, xc);
        iv.hi = std::max(iv.hi, xc);
      }
    }
  }
  return iv;
}

Polygon pwa_sublevel_polygon_2d(const InnerLinearization& lin, double s) {
  std::vector<Eigen::Vector2d> pts;
  for (const auto& f : lin.facets) {
    Polygon tri = {Eigen::Vector2d(lin.breakPoints[f.v[0]].x[0], lin.breakPoints[f.v[0]].x[1]),
                   Eigen::Vector2d(lin.breakPoints[f.v[1]].x[0], lin.breakPoints[f.v[1]].x[1]),
                   Eigen::Vector2d(lin.breakPoints[f.v[2]].x[0], lin.breakPoints[f.v[2]].x[1])};
    HalfPlane hp{Eigen::Vector2d(f.grad[0], f.grad[1]), s - f.offset};
    Polygon clipped = clip_polygon(tri, hp);
    for (const auto& v : clipped) pts.push_back(v);
  }
  return convex_hull_2d(pts);
}

double radial_profile_value(const RadialProfileBase& r, double radius) {
  if (radius <= r.radii.front()) return r.values.front();
  if (radius >= r.radii.back()) return 0.0;
  auto it = std::upper_bound(r.radii.begin(), r.radii.end(), radius);
  std::size_t hi = static_cast<std::size_t>(it - r.radii.begin());
  std::size_t lo = hi - 1;
  double w = (radius - r.radii[lo]) / (r.radii[hi] - r.radii[lo]);
  return (1.0 - w) * r.values[lo] + w * r.values[hi];
}

// Radius of {f >= t} for a radial profile (linear inverse interpolation).
double radial_profile_level_radius(const RadialProfileBase& r, double t) {
  if (t > r.values.front()) return -1.0;
  if (t <= 0.0) return r.radii.back();
  // values are nonincreasing in radius
  std::size_t lo = 0, hi = r.values.size() - 1;
  if (t <= r.values[hi]) return r.radii[hi];
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (r.values[mid] >= t)
      lo = mid;
    else
      hi = mid;
  }
  double v0 = r.values[lo], v1 = r.values[hi];
  if (v0 == v1) return r.radii[hi];
  double w = (v0 - t) / (v0 - v1);
  return r.radii[lo] + w * (r.radii[hi] - r.radii[lo]);
}

}  // namespace

// ---------------------------------------------------------------------------
// eval / base_value
// ---------------------------------------------------------------------------

double base_value(const AlphaConcaveFunction& f, const Vec& x) {
  const BaseFunction& base = f.base();
  if (auto* q = std::get_if<QuadraticBase>(&base)) return quad_eval(*q, x);
  if (auto* c = std::get_if<ConeBase>(&base)) return cone_eval(*c, x);
  if (auto* r = std::get_if<RadialConeBase>(&base)) return r->offset + r->rate * x.norm();
  if (auto* p = std::get_if<PolytopeIndicatorBase>(&base)) {
    if (f.dim() == 1) {
      double lo = kInf, hi = -kInf;
      for (const auto& v : p->vertices) {
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
      }
      return (x[0] >= lo - 1e-12 && x[0] <= hi + 1e-12) ? p->offset : kInf;
    }
    Polygon poly;
    polygon_of(*p, poly);
    return point_in_polygon(poly, Eigen::Vector2d(x[0], x[1])) ? p->offset : kInf;
  }
  if (auto* b = std::get_if<BallIndicatorBase>(&base))
    return x.norm() <= b->radius * (1.0 + 1e-12) ? b->offset : kInf;
  if (auto* w = std::get_if<PiecewiseAffineBase>(&base))
    return eval_linearization_facets(*w->lin, x);
  if (auto* g = std::get_if<GridBase>(&base))
    return base_level_of_value(f.transform_alpha(), g->grid->eval(x));
  if (auto* r = std::get_if<RadialProfileBase>(&base))
    return base_level_of_value(f.transform_alpha(), radial_profile_value(*r, x.norm()));
  throw std::logic_error("base_value: unhandled kind");
}

double eval(const AlphaConcaveFunction& f, const Vec& x) {
  const BaseFunction& base = f.base();
  if (auto* g = std::get_if<GridBase>(&base)) return g->grid->eval(x);
  if (auto* r = std::get_if<RadialProfileBase>(&base))
    return radial_profile_value(*r, x.norm());
  return value_of_base_level(f.transform_alpha(), base_value(f, x));
}

const BaseFunction& base_of_function(const AlphaConcaveFunction& f) { return f.base(); }

bool AlphaConcaveFunction::is_radial() const {
  if (auto* q = std::get_if<QuadraticBase>(&base_)) {
    if (q->center.norm() > 0.0) return false;
    if (dim_ == 1) return true;
    return std::abs(q->Q(0, 1)) <= 1e-14 && std::abs(q->Q(1, 0)) <= 1e-14 &&
           std::abs(q->Q(0, 0) - q->Q(1, 1)) <= 1e-14 * (1.0 + std::abs(q->Q(0, 0)));
  }
  return std::holds_alternative<RadialConeBase>(base_) ||
         std::holds_alternative<BallIndicatorBase>(base_) ||
         std::holds_alternative<RadialProfileBase>(base_);
}

// ---------------------------------------------------------------------------
// Superlevel sets
// ---------------------------------------------------------------------------

LevelSetDescriptor superlevel_set_descriptor(const AlphaConcaveFunction& f, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("superlevel_set_descriptor: level must be > 0");
  LevelSetDescriptor d;
  if (t > f.max_value()) return d;  // Empty
  const AlphaParam ta = f.transform_alpha();
  const BaseFunction& base = f.base();

  if (auto* q = std::get_if<QuadraticBase>(&base)) {
    double s = base_level_of_value(ta, t);
    double rhs = s - q->offset;
    if (rhs < 0.0) return d;
    if (f.dim() == 1) {
      double half = std::sqrt(rhs / q->Q(0, 0));
      d.kind = LevelSetDescriptor::Kind::Interval;
      d.a = q->center[0] - half;
      d.b = q->center[0] + half;
      d.volume = d.b - d.a;
      return d;
    }
    d.kind = LevelSetDescriptor::Kind::Ellipse;
    d.center = q->center;
    d.shape = q->Q;
    d.rhs = rhs;
    d.volume = M_PI * rhs / std::sqrt(q->Q.determinant());
    return d;
  }
  if (auto* c = std::get_if<ConeBase>(&base)) {
    double s = base_level_of_value(ta, t);
    if (f.dim() == 1) {
      Interval iv = cone_sublevel_interval(*c, s);
      if (iv.empty()) return d;
      d.kind = LevelSetDescriptor::Kind::Interval;
      d.a = iv.lo;
      d.b = iv.hi;
      d.volume = iv.length();
      return d;
    }
    Polygon poly = cone_sublevel_polygon(*c, s);
    if (poly.size() < 3) return d;
    d.kind = LevelSetDescriptor::Kind::Polygon;
    d.polygon = std::move(poly);
    d.volume = polygon_area(d.polygon);
    return d;
  }
  if (auto* r = std::get_if<RadialConeBase>(&base)) {
    double s = base_level_of_value(ta, t);
    double radius = (s - r->offset) / r->rate;
    if (radius < 0.0) return d;
    if (f.dim() == 1) {
      d.kind = LevelSetDescriptor::Kind::Interval;
      d.a = -radius;
      d.b = radius;
      d.volume = 2.0 * radius;
      return d;
    }
    d.kind = LevelSetDescriptor::Kind::Ball;
    d.center = vec2(0.0, 0.0);
    d.radius = radius;
    d.volume = M_PI * radius * radius;
    return d;
  }
  if (auto* p = std::get_if<PolytopeIndicatorBase>(&base)) {
    // f is constant on K; t <= fmax was checked above, so the set is K.
    if (f.dim() == 1) {
      double lo = kInf, hi = -kInf;
      for (const auto& v : p->vertices) {
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
      }
      d.kind = LevelSetDescriptor::Kind::Interval;
      d.a = lo;
      d.b = hi;
      d.volume = hi - lo;
      return d;
    }
    d.kind = LevelSetDescriptor::Kind::Polygon;
    d.volume = polygon_of(*p, d.polygon);
    return d;
  }
  if (auto* b = std::get_if<BallIndicatorBase>(&base)) {
    if (f.dim() == 1) {
      d.kind = LevelSetDescriptor::Kind::Interval;
      d.a = -b->radius;
      d.b = b->radius;
      d.volume = 2.0 * b->radius;
      return d;
    }
    d.kind = LevelSetDescriptor::Kind::Ball;
    d.center = vec2(0.0, 0.0);
    d.radius = b->radius;
    d.volume = M_PI * b->radius * b->radius;
    return d;
  }
  if (auto* w = std::get_if<PiecewiseAffineBase>(&base)) {
    double s = base_level_of_value(ta, t);
    if (w->lin->degenerate) {
      // measure-zero domain
      if (w->lin->breakPoints.size() == 1 && w->lin->breakPoints[0].t <= s) {
        d.kind = f.dim() == 1 ? LevelSetDescriptor::Kind::Interval
                              : LevelSetDescriptor::Kind::Polygon;
        if (f.dim() == 1) d.a = d.b = w->lin->breakPoints[0].x[0];
      }
      return d;
    }
    if (f.dim() == 1) {
      Interval iv = pwa_sublevel_interval_1d(*w->lin, s);
      if (iv.empty()) return d;
      d.kind = LevelSetDescriptor::Kind::Interval;
      d.a = iv.lo;
      d.b = iv.hi;
      d.volume = iv.length();
      return d;
    }
    Polygon poly = pwa_sublevel_polygon_2d(*w->lin, s);
    if (poly.size() < 3) return d;
    d.kind = LevelSetDescriptor::Kind::Polygon;
    d.polygon = std::move(poly);
    d.volume = polygon_area(d.polygon);
    return d;
  }
  if (auto* g = std::get_if<GridBase>(&base)) {
    const auto& grid = *g->grid;
    d.kind = LevelSetDescriptor::Kind::GridMask;
    d.grid = g->grid;
    double cell = 1.0;
    for (int a = 0; a < grid.dim(); ++a) cell *= grid.step(a);
    std::int64_t count = 0, straddle = 0;
    const auto& vals = grid.values();
    d.mask.resize(vals.size());
    if (grid.dim() == 1) {
      for (std::size_t i = 0; i < vals.size(); ++i) {
        d.mask[i] = vals[i] >= t;
        count += d.mask[i];
        if (i + 1 < vals.size() && (vals[i] >= t) != (vals[i + 1] >= t)) ++straddle;
      }
    } else {
      auto res = grid.resolution();
      for (std::int64_t i = 0; i < res[0]; ++i) {
        for (std::int64_t j = 0; j < res[1]; ++j) {
          bool in = grid.at(i, j) >= t;
          d.mask[i * res[1] + j] = in;
          count += in;
          bool edge = (i + 1 < res[0] && (grid.at(i + 1, j) >= t) != in) ||
                      (j + 1 < res[1] && (grid.at(i, j + 1) >= t) != in);
          if (edge) ++straddle;
        }
      }
    }
    d.volume = static_cast<double>(count) * cell;
    d.volume_bound = static_cast<double>(straddle) * cell;
    return d;
  }
  if (auto* r = std::get_if<RadialProfileBase>(&base)) {
    double radius = radial_profile_level_radius(*r, t);
    if (radius < 0.0) return d;
    if (f.dim() == 1) {
      d.kind = LevelSetDescriptor::Kind::Interval;
      d.a = -radius;
      d.b = radius;
      d.volume = 2.0 * radius;
      return d;
    }
    d.kind = LevelSetDescriptor::Kind::Ball;
    d.center = vec2(0.0, 0.0);
    d.radius = radius;
    d.volume = M_PI * radius * radius;
    return d;
  }
  throw std::logic_error("superlevel_set_descriptor: unhandled kind");
}

// ---------------------------------------------------------------------------
// Chords {sigma : f(p + sigma u) >= t}
// ---------------------------------------------------------------------------

namespace {

std::optional<std::pair<double, double>> quad_chord(double A, double B, double C) {
  // A s^2 + B s + C <= 0 with A > 0
  double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) return std::nullopt;
  double r = std::sqrt(disc);
  return std::make_pair((-B - r) / (2.0 * A), (-B + r) / (2.0 * A));
}

std::optional<std::pair<double, double>> grid_chord(const GridFunction& grid, const Vec& p,
                                                    const Vec& u, double t) {
  // bracket on samples, then bisect the two edges to width 1e-10.
  Box box = grid.box();
  double R = box.diameter() + (p - 0.5 * (box.lo + box.hi)).norm();
  const int K = 4096;
  double lo_in = kInf, hi_in = -kInf;
  double step = 2.0 * R / K;
  for (int i = 0; i <= K; ++i) {
    double s = -R + i * step;
    if (grid.eval(p + s * u) >= t) {
      lo_in = std::min(lo_in, s);
      hi_in = std::max(hi_in, s);
    }
  }
  if (lo_in > hi_in) return std::nullopt;
  auto bisect_edge = [&](double inside, double outside) {
    for (int it = 0; it < 60 && std::abs(outside - inside) > 1e-10; ++it) {
      double mid = 0.5 * (inside + outside);
      if (grid.eval(p + mid * u) >= t)
        inside = mid;
      else
        outside = mid;
    }
    return inside;
  };
  double lo = bisect_edge(lo_in, lo_in - step);
  double hi = bisect_edge(hi_in, hi_in + step);
  return std::make_pair(lo, hi);
}

}  // namespace

std::optional<std::pair<double, double>> superlevel_chord(const AlphaConcaveFunction& f,
                                                          const Vec& p, const Vec& u, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("superlevel_chord: level must be > 0");
  const AlphaParam ta = f.transform_alpha();
  const BaseFunction& base = f.base();

  if (auto* g = std::get_if<GridBase>(&base)) return grid_chord(*g->grid, p, u, t);

  double s = base_level_of_value(ta, t);
  if (auto* q = std::get_if<QuadraticBase>(&base)) {
    Vec r = p - q->center;
    double A = u.dot(q->Q * u);
    double B = 2.0 * u.dot(q->Q * r);
    double C = r.dot(q->Q * r) + q->offset - s;
    return quad_chord(A, B, C);
  }
  if (auto* c = std::get_if<ConeBase>(&base)) {
    double lo = -kInf, hi = kInf;
    double rhs = s - c->offset;
    auto apply = [&](double slope, double off) -> bool {
      // slope*sigma <= off
      if (slope > 0.0)
        hi = std::min(hi, off / slope);
      else if (slope < 0.0)
        lo = std::max(lo, off / slope);
      else if (off < 0.0)
        return false;
      return true;
    };
    for (const auto& g : c->gradients)
      if (!apply(g.dot(u), rhs - g.dot(p - c->center))) return std::nullopt;
    for (const auto& h : c->domain)
      if (!apply(h.normal.dot(u), h.offset - h.normal.dot(p))) return std::nullopt;
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
  }
  if (auto* r = std::get_if<RadialConeBase>(&base)) {
    double radius = (s - r->offset) / r->rate;
    if (radius < 0.0) return std::nullopt;
    return quad_chord(u.squaredNorm(), 2.0 * u.dot(p), p.squaredNorm() - radius * radius);
  }
  if (auto* pk = std::get_if<PolytopeIndicatorBase>(&base)) {
    if (s < pk->offset) return std::nullopt;  // t above the constant height
    if (f.dim() == 1) {
      double lo = kInf, hi = -kInf;
      for (const auto& v : pk->vertices) {
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
      }
      if (u[0] == 0.0) return std::nullopt;
      double s0 = (lo - p[0]) / u[0], s1 = (hi - p[0]) / u[0];
      return std::make_pair(std::min(s0, s1), std::max(s0, s1));
    }
    Polygon poly;
    polygon_of(*pk, poly);
    auto iv = line_polygon_interval(poly, Eigen::Vector2d(p[0], p[1]),
                                    Eigen::Vector2d(u[0], u[1]));
    if (!iv) return std::nullopt;
    return std::make_pair(iv->first, iv->second);
  }
  if (auto* b = std::get_if<BallIndicatorBase>(&base)) {
    if (s < b->offset) return std::nullopt;
    return quad_chord(u.squaredNorm(), 2.0 * u.dot(p), p.squaredNorm() - b->radius * b->radius);
  }
  if (auto* w = std::get_if<PiecewiseAffineBase>(&base)) {
    const auto& lin = *w->lin;
    if (lin.degenerate) return std::nullopt;  // measure-zero chords are empty a.e.
    double lo = kInf, hi = -kInf;
    if (f.dim() == 1) {
      Interval iv = pwa_sublevel_interval_1d(lin, s);
      if (iv.empty() || u[0] == 0.0) return std::nullopt;
      double s0 = (iv.lo - p[0]) / u[0], s1 = (iv.hi - p[0]) / u[0];
      return std::make_pair(std::min(s0, s1), std::max(s0, s1));
    }
    for (const auto& fc : lin.facets) {
      Polygon tri = {
          Eigen::Vector2d(lin.breakPoints[fc.v[0]].x[0], lin.breakPoints[fc.v[0]].x[1]),
          Eigen::Vector2d(lin.breakPoints[fc.v[1]].x[0], lin.breakPoints[fc.v[1]].x[1]),
          Eigen::Vector2d(lin.breakPoints[fc.v[2]].x[0], lin.breakPoints[fc.v[2]].x[1])};
      auto iv = line_polygon_interval(tri, Eigen::Vector2d(p[0], p[1]),
                                      Eigen::Vector2d(u[0], u[1]));
      if (!iv) continue;
      // affine value along the line: value(sigma) = a*sigma + b0
      double a = fc.grad.dot(u);
      double b0 = fc.grad.dot(p) + fc.offset;
      double ca = iv->first, cb = iv->second;
      // solve a*sigma + b0 <= s on [ca, cb]
      double plo = ca, phi = cb;
      if (a > 0.0)
        phi = std::min(phi, (s - b0) / a);
      else if (a < 0.0)
        plo = std::max(plo, (s - b0) / a);
      else if (b0 > s)
        continue;
      if (plo <= phi) {
        lo = std::min(lo, plo);
        hi = std::max(hi, phi);
      }
    }
    if (lo > hi) return std::nullopt;
    return std::make_pair(lo, hi);
  }
  if (auto* r = std::get_if<RadialProfileBase>(&base)) {
    double radius = radial_profile_level_radius(*r, t);
    if (radius < 0.0) return std::nullopt;
    return quad_chord(u.squaredNorm(), 2.0 * u.dot(p), p.squaredNorm() - radius * radius);
  }
  throw std::logic_error("superlevel_chord: unhandled kind");
}

// ---------------------------------------------------------------------------
// Support handling
// ---------------------------------------------------------------------------

namespace {

Box box_of_polygon(const Polygon& poly) {
  Box b;
  b.lo = vec2(kInf, kInf);
  b.hi = vec2(-kInf, -kInf);
  for (const auto& v : poly) {
    b.lo[0] = std::min(b.lo[0], v.x());
    b.lo[1] = std::min(b.lo[1], v.y());
    b.hi[0] = std::max(b.hi[0], v.x());
    b.hi[1] = std::max(b.hi[1], v.y());
  }
  return b;
}

Box sublevel_box(const BaseFunction& base, int dim, double s) {
  if (auto* q = std::get_if<QuadraticBase>(&base)) {
    double rhs = std::max(0.0, s - q->offset);
    Box b;
    b.lo.resize(dim);
    b.hi.resize(dim);
    Mat inv = q->Q.inverse();
    for (int a = 0; a < dim; ++a) {
      double half = std::sqrt(std::max(0.0, rhs * inv(a, a)));
      b.lo[a] = q->center[a] - half;
      b.hi[a] = q->center[a] + half;
    }
    return b;
  }
  if (auto* c = std::get_if<ConeBase>(&base)) {
    if (dim == 1) {
      Interval iv = cone_sublevel_interval(*c, s);
      if (iv.empty()) iv = {c->center[0], c->center[0]};
      Box b;
      b.lo = vec1(iv.lo);
      b.hi = vec1(iv.hi);
      return b;
    }
    Polygon poly = cone_sublevel_polygon(*c, s);
    if (poly.empty())
      return Box{c->center, c->center};
    return box_of_polygon(poly);
  }
  if (auto* r = std::get_if<RadialConeBase>(&base)) {
    double radius = std::max(0.0, (s - r->offset) / r->rate);
    Box b;
    b.lo.resize(dim);
    b.hi.resize(dim);
    for (int a = 0; a < dim; ++a) {
      b.lo[a] = -radius;
      b.hi[a] = radius;
    }
    return b;
  }
  throw std::logic_error("sublevel_box: unhandled kind");
}

}  // namespace

Vec project_into_support(const AlphaConcaveFunction& f, const Vec& x) {
  const BaseFunction& base = f.base();
  const AlphaParam a = f.alpha();
  if (auto* p = std::get_if<PolytopeIndicatorBase>(&base)) {
    if (f.dim() == 1) {
      double lo = kInf, hi = -kInf;
      for (const auto& v : p->vertices) {
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
      }
      return vec1(std::clamp(x[0], lo, hi));
    }
    Polygon poly;
    polygon_of(*p, poly);
    Eigen::Vector2d q = closest_point_in_polygon(poly, Eigen::Vector2d(x[0], x[1]));
    return vec2(q.x(), q.y());
  }
  if (auto* b = std::get_if<BallIndicatorBase>(&base)) {
    double n = x.norm();
    if (n <= b->radius) return x;
    return x * (b->radius / n);
  }
  if (auto* w = std::get_if<PiecewiseAffineBase>(&base)) {
    if (w->lin->breakPoints.empty()) return x;
    if (f.dim() == 1) {
      double lo = w->lin->breakPoints.front().x[0];
      double hi = w->lin->breakPoints.back().x[0];
      return vec1(std::clamp(x[0], lo, hi));
    }
    std::vector<Eigen::Vector2d> pts;
    for (const auto& bp : w->lin->breakPoints) pts.emplace_back(bp.x[0], bp.x[1]);
    Polygon poly = convex_hull_2d(pts);
    if (poly.empty()) return x;
    Eigen::Vector2d q = closest_point_in_polygon(poly, Eigen::Vector2d(x[0], x[1]));
    return vec2(q.x(), q.y());
  }
  if (std::get_if<QuadraticBase>(&base) || std::get_if<RadialConeBase>(&base)) {
    if (a.value() > 0.0 && !a.is_inf()) {
      // exact support {psi <= 1/alpha}: scale toward the center in base metric
      double s_max = 1.0 / a.value();
      if (auto* q = std::get_if<QuadraticBase>(&base)) {
        double rhs = s_max - q->offset;
        Vec r = x - q->center;
        double v = r.dot(q->Q * r);
        if (v <= rhs || v <= 0.0) return x;
        return q->center + r * std::sqrt(std::max(0.0, rhs) / v);
      }
      auto* r = std::get_if<RadialConeBase>(&base);
      double radius = std::max(0.0, (s_max - r->offset) / r->rate);
      double n = x.norm();
      return n <= radius ? x : Vec(x * (radius / std::max(n, 1e-300)));
    }
    // full support: clamp into the truncated support box
    Vec y = x;
    for (int i = 0; i < f.dim(); ++i)
      y[i] = std::clamp(y[i], f.support_box().lo[i], f.support_box().hi[i]);
    return y;
  }
  if (auto* c = std::get_if<ConeBase>(&base)) {
    double s_cut = (a.value() > 0.0 && !a.is_inf())
                       ? 1.0 / a.value()
                       : base_level_of_value(f.transform_alpha(),
                                             kTailValueFraction * f.max_value());
    if (f.dim() == 1) {
      Interval iv = cone_sublevel_interval(*c, s_cut);
      if (iv.empty()) return f.peak();
      return vec1(std::clamp(x[0], iv.lo, iv.hi));
    }
    Polygon poly = cone_sublevel_polygon(*c, s_cut);
    if (poly.size() < 3) return f.peak();
    Eigen::Vector2d q = closest_point_in_polygon(poly, Eigen::Vector2d(x[0], x[1]));
    return vec2(q.x(), q.y());
  }
  // grid / radial profile: clamp to the box
  Vec y = x;
  for (int i = 0; i < f.dim(); ++i)
    y[i] = std::clamp(y[i], f.support_box().lo[i], f.support_box().hi[i]);
  return y;
}

// ---------------------------------------------------------------------------
// Construction / validation
// ---------------------------------------------------------------------------

AlphaConcaveFunction function_of_base(const AlphaParam& alpha, BaseFunction base) {
  // (base_value only needs alpha_, base_, dim_, all of which are set below
  // before it is first called.)
  AlphaConcaveFunction f;
  f.alpha_ = alpha;
  f.base_ = std::move(base);
  f.dim_ = base_dim(f.base_);
  if (f.dim_ != 1 && f.dim_ != 2)
    throw std::invalid_argument("function_of_base: dimension must be 1 or 2");
  const AlphaParam ta = f.transform_alpha();
  const double a = alpha.value();
  const bool indicator_kind = std::holds_alternative<PolytopeIndicatorBase>(f.base_) ||
                              std::holds_alternative<BallIndicatorBase>(f.base_);
  // Grid, piecewise-affine and radial-profile carriers have bounded support,
  // so the integrability restrictions below do not apply to them.
  const bool bounded_carrier = std::holds_alternative<GridBase>(f.base_) ||
                               std::holds_alternative<PiecewiseAffineBase>(f.base_) ||
                               std::holds_alternative<RadialProfileBase>(f.base_);
  if (alpha.is_inf() && !indicator_kind && !bounded_carrier)
    throw std::invalid_argument("alpha = +inf requires an indicator base");
  if (!alpha.is_inf() && a < 0.0 && !indicator_kind && !bounded_carrier) {
    auto* q = std::get_if<QuadraticBase>(&f.base_);
    if (!q)
      throw std::invalid_argument(
          "alpha < 0 requires a quadratic base (integrability not guaranteed otherwise)");
    if (f.dim_ * (-a) >= 2.0 - 1e-12)
      throw std::invalid_argument("alpha < 0: tail decay too slow to integrate (need n|alpha|<2)");
    if (q->offset <= -1.0 / (-a) + 1e-12)
      throw std::invalid_argument("alpha < 0: base minimum must stay above -1/|alpha|");
  }
  // Carrier kinds derive base values from stored function values, which keeps
  // them above the alpha < 0 kernel pole automatically.

  // Kind-specific checks + peak.
  if (auto* q = std::get_if<QuadraticBase>(&f.base_)) {
    Mat sym = 0.5 * (q->Q + q->Q.transpose());
    q->Q = sym;
    bool spd = q->Q(0, 0) > 0.0 && (f.dim_ == 1 || q->Q.determinant() > 0.0);
    if (!spd) throw std::invalid_argument("quadratic base: Q must be positive definite");
    f.peak_ = q->center;
    f.fmax_ = value_of_base_level(ta, q->offset);
  } else if (auto* c = std::get_if<ConeBase>(&f.base_)) {
    if (c->gradients.empty()) throw std::invalid_argument("cone base: needs gradients");
    Vec origin = f.dim_ == 1 ? vec1(0.0) : vec2(0.0, 0.0);
    if (cone_eval(*c, origin) == kInf)
      throw std::invalid_argument("cone base: origin must lie in the domain");
    auto [mn, arg] = cone_minimum(*c);
    // coercivity probe: a sublevel set well above the minimum must be bounded
    double gmax = 0.0;
    for (const auto& g : c->gradients) gmax = std::max(gmax, g.norm());
    double s_probe = mn + 10.0 * gmax * (1.0 + c->center.norm()) + 10.0;
    if (f.dim_ == 1) {
      Interval iv = cone_sublevel_interval(*c, s_probe);
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
        throw std::invalid_argument("cone base: unbounded sublevel set (non-coercive)");
    } else {
      cone_sublevel_polygon(*c, s_probe);  // throws when unbounded
    }
    f.peak_ = arg;
    f.fmax_ = value_of_base_level(ta, mn);
  } else if (auto* r = std::get_if<RadialConeBase>(&f.base_)) {
    if (!(r->rate > 0.0)) throw std::invalid_argument("radial cone base: rate must be positive");
    f.peak_ = r->dim == 1 ? vec1(0.0) : vec2(0.0, 0.0);
    f.fmax_ = value_of_base_level(ta, r->offset);
  } else if (auto* p = std::get_if<PolytopeIndicatorBase>(&f.base_)) {
    if (f.dim_ == 1) {
      if (p->vertices.size() < 2)
        throw std::invalid_argument("polytope indicator: need an interval in 1D");
    } else {
      Polygon poly;
      if (polygon_of(*p, poly) <= 0.0 || poly.size() < 3)
        throw std::invalid_argument("polytope indicator: vertices must span positive area");
    }
    Vec origin = f.dim_ == 1 ? vec1(0.0) : vec2(0.0, 0.0);
    if (base_value(f, origin) == kInf)
      throw std::invalid_argument("polytope indicator: origin must lie in the body");
    f.peak_ = origin;
    f.fmax_ = value_of_base_level(ta, p->offset);
  } else if (auto* b = std::get_if<BallIndicatorBase>(&f.base_)) {
    if (!(b->radius > 0.0)) throw std::invalid_argument("ball indicator: radius must be positive");
    f.peak_ = b->dim == 1 ? vec1(0.0) : vec2(0.0, 0.0);
    f.fmax_ = value_of_base_level(ta, b->offset);
  } else if (auto* w = std::get_if<PiecewiseAffineBase>(&f.base_)) {
    if (!w->lin || w->lin->breakPoints.empty())
      throw std::invalid_argument("piecewise affine base: empty linearization");
    double best = kInf;
    Vec arg = w->lin->breakPoints[0].x;
    for (const auto& bp : w->lin->breakPoints) {
      if (bp.t < best) {
        best = bp.t;
        arg = bp.x;
      }
    }
    f.peak_ = arg;
    f.fmax_ = value_of_base_level(ta, best);
  } else if (auto* g = std::get_if<GridBase>(&f.base_)) {
    const auto& vals = g->grid->values();
    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
      if (vals[i] > vals[best]) best = i;
    f.fmax_ = vals[best];
    if (g->grid->dim() == 1) {
      f.peak_ = vec1(g->grid->node_coord(0, static_cast<std::int64_t>(best)));
    } else {
      auto res = g->grid->resolution();
      std::int64_t i = static_cast<std::int64_t>(best) / res[1];
      std::int64_t j = static_cast<std::int64_t>(best) % res[1];
      f.peak_ = vec2(g->grid->node_coord(0, i), g->grid->node_coord(1, j));
    }
  } else if (auto* r = std::get_if<RadialProfileBase>(&f.base_)) {
    if (r->radii.size() < 2 || r->radii.size() != r->values.size())
      throw std::invalid_argument("radial profile: need matching radius/value tables");
    if (!(r->values.front() > 0.0))
      throw std::invalid_argument("radial profile: peak value must be positive");
    f.peak_ = r->dim == 1 ? vec1(0.0) : vec2(0.0, 0.0);
    f.fmax_ = r->values.front();
  }

  if (!(f.fmax_ > 0.0) || !std::isfinite(f.fmax_))
    throw std::invalid_argument("function_of_base: maximum value must be positive and finite");

  // o in supp(f): reject at ingestion rather than translating.
  Vec origin = f.dim_ == 1 ? vec1(0.0) : vec2(0.0, 0.0);
  if (!(std::holds_alternative<PiecewiseAffineBase>(f.base_) ||
        std::holds_alternative<GridBase>(f.base_))) {
    double psi0 = base_value(f, origin);
    bool in_supp = std::isfinite(psi0);
    if (in_supp && !alpha.is_inf() && a > 0.0) in_supp = psi0 <= 1.0 / a + 1e-12;
    if (!in_supp)
      throw std::invalid_argument("function_of_base: origin must lie in the support");
  }

  // Support box + tail bound.
  if (indicator_kind || std::holds_alternative<PiecewiseAffineBase>(f.base_) ||
      std::holds_alternative<GridBase>(f.base_) ||
      std::holds_alternative<RadialProfileBase>(f.base_)) {
    if (auto* p = std::get_if<PolytopeIndicatorBase>(&f.base_)) {
      Box b;
      b.lo = p->vertices[0];
      b.hi = p->vertices[0];
      for (const auto& v : p->vertices) {
        b.lo = b.lo.cwiseMin(v);
        b.hi = b.hi.cwiseMax(v);
      }
      f.support_box_ = b;
    } else if (auto* b = std::get_if<BallIndicatorBase>(&f.base_)) {
      Box bx;
      bx.lo.resize(f.dim_);
      bx.hi.resize(f.dim_);
      for (int i = 0; i < f.dim_; ++i) {
        bx.lo[i] = -b->radius;
        bx.hi[i] = b->radius;
      }
      f.support_box_ = bx;
    } else if (auto* w = std::get_if<PiecewiseAffineBase>(&f.base_)) {
      Box b;
      b.lo = w->lin->breakPoints[0].x;
      b.hi = w->lin->breakPoints[0].x;
      for (const auto& bp : w->lin->breakPoints) {
        b.lo = b.lo.cwiseMin(bp.x);
        b.hi = b.hi.cwiseMax(bp.x);
      }
      f.support_box_ = b;
    } else if (auto* g = std::get_if<GridBase>(&f.base_)) {
      f.support_box_ = g->grid->box();
      f.tail_bound_ = g->grid->tail_mass_bound();
    } else if (auto* r = std::get_if<RadialProfileBase>(&f.base_)) {
      Box b;
      b.lo.resize(f.dim_);
      b.hi.resize(f.dim_);
      for (int i = 0; i < f.dim_; ++i) {
        b.lo[i] = -r->radii.back();
        b.hi[i] = r->radii.back();
      }
      f.support_box_ = b;
    }
  } else {
    double t_cut;
    double s_cut;
    if (!alpha.is_inf() && a > 0.0) {
      s_cut = 1.0 / a;  // exact support boundary
      t_cut = 0.0;
    } else {
      t_cut = kTailValueFraction * f.fmax_;
      s_cut = base_level_of_value(ta, t_cut);
    }
    f.support_box_ = sublevel_box(f.base_, f.dim_, s_cut);
    if (t_cut > 0.0) {
      LevelSetDescriptor lev = superlevel_set_descriptor(f, t_cut);
      double factor = a < 0.0 ? 2.0 / (1.0 - (-a) * f.dim_ / 2.0) : 2.0;
      f.tail_bound_ = factor * t_cut * std::max(lev.volume, 1.0);
    }
  }
  return f;
}


// ---------------------------------------------------------------------------
// Minorants
// ---------------------------------------------------------------------------

double minorant_eval(const AlphaMinorant& q, const Vec& x) {
  return value_of_base_level(q.alpha, eval_linearization_facets(q.lin, x));
}

AlphaMinorant minorant_from_epi_points(const AlphaParam& transform_alpha,
                                       std::vector<EpiPoint> pts, bool allow_degenerate,
                                       bool filter_break_points) {
  AlphaMinorant q;
  q.alpha = transform_alpha;
  q.lin = inner_linearization(std::move(pts), allow_degenerate, filter_break_points);
  return q;
}

AlphaMinorant alpha_minorant_from_points(const AlphaConcaveFunction& f,
                                         const std::vector<HypoPoint>& pts,
                                         bool allow_degenerate) {
  const AlphaParam ta = f.transform_alpha();
  std::vector<EpiPoint> epi;
  epi.reserve(pts.size());
  for (const auto& hp : pts) {
    if (!(hp.y > 0.0)) throw ZeroHeightError("alpha_minorant_from_points: height must be > 0");
    double fx = eval(f, hp.x);
    if (hp.y > fx * (1.0 + 1e-9))
      throw PointAboveGraphError("alpha_minorant_from_points: point above the graph");
    epi.push_back({hp.x, base_level_of_value(ta, hp.y)});
  }
  return minorant_from_epi_points(ta, std::move(epi), allow_degenerate, true);
}

AlphaConcaveFunction minorant_as_function(const AlphaMinorant& q) {
  return function_of_base(q.alpha,
                          PiecewiseAffineBase{std::make_shared<InnerLinearization>(q.lin)});
}

}  // namespace mlab
