#include "mlab/measure.hpp"

#include "mlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mlab {

namespace {

constexpr double kTaylorSpread = 1e-6;  // divided differences switch to series

// ---------------------------------------------------------------------------
// Kernel phi(l) = (1 - alpha l)_+^{1/alpha}, e^{-l} at alpha = 0, together
// with the antiderivatives entering segment and triangle integrals:
//   Phi1' = phi, Phi2'' = phi.
// Everything is expressed through log1p/exp so small alpha stays stable.
// ---------------------------------------------------------------------------

class AlphaKernel {
 public:
  explicit AlphaKernel(const AlphaParam& alpha) : a_(alpha.value()) {
    if (alpha.is_inf()) throw std::invalid_argument("AlphaKernel: alpha must be finite");
  }

  double w(double l) const { return 1.0 - a_ * l; }  // must stay > 0 off the clip

  double phi(double l) const {
    if (a_ == 0.0) return std::exp(-l);
    double v = w(l);
    if (v <= 0.0) return 0.0;
    return std::exp(std::log1p(-a_ * l) / a_);
  }

  /// (1 - alpha l)_+^{1/alpha + k} for k = 1, 2.
  double pow_shift(double l, int k) const {
    double v = w(l);
    if (v <= 0.0) return 0.0;
    return std::exp((1.0 / a_ + k) * std::log1p(-a_ * l));
  }

  double Phi1(double l) const {
    if (a_ == 0.0) return -std::exp(-l);
    if (a_ == -1.0) return std::log1p(l);
    return -pow_shift(l, 1) / (1.0 + a_);
  }

  double Phi2(double l) const {
    if (a_ == 0.0) return std::exp(-l);
    if (a_ == -1.0) return (1.0 + l) * std::log1p(l);
    if (a_ == -0.5) return -4.0 * std::log1p(0.5 * l);
    return pow_shift(l, 2) / ((1.0 + a_) * (1.0 + 2.0 * a_));
  }

  double Phi2p(double l) const {
    if (a_ == 0.0) return -std::exp(-l);
    if (a_ == -1.0) return std::log1p(l) + 1.0;
    if (a_ == -0.5) return -2.0 / (1.0 + 0.5 * l);
    return -pow_shift(l, 1) / (1.0 + a_);
  }

  /// j-th derivative of phi at l: prod_{i<j}(1 - i*alpha) * (-1)^j * w^{1/alpha - j}.
  double phi_deriv(int j, double l) const {
    if (a_ == 0.0) return (j % 2 ? -1.0 : 1.0) * std::exp(-l);
    double v = w(l);
    if (v <= 0.0) return 0.0;
    double coef = 1.0;
    for (int i = 0; i < j; ++i) coef *= (1.0 - static_cast<double>(i) * a_);
    double p = std::exp((1.0 / a_ - j) * std::log1p(-a_ * l));
    return (j % 2 ? -coef : coef) * p;
  }

  /// Mean of phi over a segment with endpoint values (l0, l1).
  double segment_mean(double l0, double l1) const {
    double h = l1 - l0;
    if (std::abs(h) < kTaylorSpread) {
      double m = 0.5 * (l0 + l1);
      double h2 = h * h;
      return phi(m) + phi_deriv(2, m) * h2 / 24.0 + phi_deriv(4, m) * h2 * h2 / 1920.0;
    }
    return (Phi1(l1) - Phi1(l0)) / h;
  }

  /// Second divided difference of Phi2 at (a, b, c); the triangle integral is
  /// 2 * area * this.
  double dd2(double x, double y, double z) const {
    double lo = std::min({x, y, z}), hi = std::max({x, y, z});
    if (hi - lo < kTaylorSpread) return dd2_series(x, y, z);
    double v[3] = {x, y, z};
    std::sort(v, v + 3);
    return (dd1(v[1], v[2]) - dd1(v[0], v[1])) / (v[2] - v[0]);
  }

 private:
  double dd1(double x, double y) const {
    double h = y - x;
    if (std::abs(h) < kTaylorSpread) {
      double m = 0.5 * (x + y);
      double h2 = h * h;
      return Phi2p(m) + phi_deriv(1, m) * h2 / 24.0 + phi_deriv(3, m) * h2 * h2 / 1920.0;
    }
    return (Phi2(y) - Phi2(x)) / h;
  }

  // Six-term series around the centroid; h_j are the complete homogeneous
  // symmetric polynomials of the centered values.
  double dd2_series(double x, double y, double z) const {
    double m = (x + y + z) / 3.0;
    double d[3] = {x - m, y - m, z - m};
    double result = 0.0;
    double factorial = 2.0;  // (j+2)! starting at j = 0
    for (int j = 0; j <= 5; ++j) {
      double hj = 0.0;
      for (int p = 0; p <= j; ++p)
        for (int q = 0; p + q <= j; ++q) {
          int r = j - p - q;
          hj += std::pow(d[0], p) * std::pow(d[1], q) * std::pow(d[2], r);
        }
      result += phi_deriv(j, m) * hj / factorial;
      factorial *= (j + 3);
    }
    return result;
  }

  double a_;
};

double segment_length(const Vec& a, const Vec& b) { return (b - a).norm(); }

double triangle_area(const Vec& a, const Vec& b, const Vec& c) {
  return 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

MassResult exact(double value) {
  return {value, 1e-12 * (1.0 + std::abs(value)), MassResult::Method::Exact};
}

// Integrate the kernel over one (possibly clipped) triangle.
double triangle_mass(const AlphaKernel& ker, const AlphaParam& alpha, const Vec& v0, const Vec& v1,
                     const Vec& v2, const AffineMap& affine) {
  double A = triangle_area(v0, v1, v2);
  if (A == 0.0) return 0.0;
  return 2.0 * A * ker.dd2(affine(v0), affine(v1), affine(v2));
}

}  // namespace

double Simplex::measure() const {
  if (dim() == 1) {
    if (vertices.size() != 2) throw std::invalid_argument("Simplex: 1D cell needs 2 vertices");
    return segment_length(vertices[0], vertices[1]);
  }
  if (vertices.size() != 3) throw std::invalid_argument("Simplex: 2D cell needs 3 vertices");
  return triangle_area(vertices[0], vertices[1], vertices[2]);
}

MassResult mass_affine_piece(const AlphaParam& alpha, const Simplex& simplex,
                             const AffineMap& affine) {
  AlphaKernel ker(alpha);
  const double a = alpha.value();
  const int n = simplex.dim();
  double scale = 0.0;
  for (const auto& v : simplex.vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  if (simplex.measure() <= 1e-14 * (1.0 + scale) * (n == 2 ? (1.0 + scale) : 1.0))
    throw DegenerateSimplexError("mass_affine_piece: degenerate simplex");

  if (a < 0.0) {
    for (const auto& v : simplex.vertices)
      if (ker.w(affine(v)) <= 0.0)
        throw std::domain_error("mass_affine_piece: kernel pole inside the cell (alpha < 0)");
  }

  if (n == 1) {
    double x0 = simplex.vertices[0][0], x1 = simplex.vertices[1][0];
    double l0 = affine(simplex.vertices[0]), l1 = affine(simplex.vertices[1]);
    if (a > 0.0) {
      // clip {l <= 1/alpha}
      double cap = 1.0 / a;
      bool in0 = l0 <= cap, in1 = l1 <= cap;
      if (!in0 && !in1) return exact(0.0);
      if (in0 != in1) {
        double t = (cap - l0) / (l1 - l0);
        double xc = x0 + t * (x1 - x0);
        if (in0) {
          x1 = xc;
          l1 = cap;
        } else {
          x0 = xc;
          l0 = cap;
        }
      }
    }
    return exact(std::abs(x1 - x0) * ker.segment_mean(l0, l1));
  }

  Polygon cell = {Eigen::Vector2d(simplex.vertices[0][0], simplex.vertices[0][1]),
                  Eigen::Vector2d(simplex.vertices[1][0], simplex.vertices[1][1]),
                  Eigen::Vector2d(simplex.vertices[2][0], simplex.vertices[2][1])};
  if (cross2(cell[1] - cell[0], cell[2] - cell[0]) < 0.0) std::swap(cell[1], cell[2]);
  if (a > 0.0) {
    HalfPlane hp{Eigen::Vector2d(affine.grad[0], affine.grad[1]), 1.0 / a - affine.offset};
    cell = clip_polygon(cell, hp);
    if (cell.size() < 3) return exact(0.0);
  }
  std::vector<double> parts;
  for (std::size_t i = 1; i + 1 < cell.size(); ++i) {
    Vec v0 = vec2(cell[0].x(), cell[0].y());
    Vec v1 = vec2(cell[i].x(), cell[i].y());
    Vec v2 = vec2(cell[i + 1].x(), cell[i + 1].y());
    parts.push_back(triangle_mass(ker, alpha, v0, v1, v2, affine));
  }
  return exact(tree_sum(std::move(parts)));
}

MassResult minorant_mass(const AlphaMinorant& q) {
  if (q.lin.degenerate || q.lin.facets.empty()) return {0.0, 0.0, MassResult::Method::Exact};
  std::vector<double> parts;
  parts.reserve(q.lin.facets.size());
  for (const auto& f : q.lin.facets) {
    Simplex cell;
    cell.vertices.push_back(q.lin.breakPoints[f.v[0]].x);
    cell.vertices.push_back(q.lin.breakPoints[f.v[1]].x);
    if (q.lin.dim == 2) cell.vertices.push_back(q.lin.breakPoints[f.v[2]].x);
    try {
      parts.push_back(mass_affine_piece(q.alpha, cell, AffineMap{f.grad, f.offset}).value);
    } catch (const DegenerateSimplexError&) {
      parts.push_back(0.0);  // zero-mass facet
    }
  }
  return exact(tree_sum(std::move(parts)));
}

// ---------------------------------------------------------------------------
// Total mass
// ---------------------------------------------------------------------------

namespace {

// Layer cake in the value variable with a truncated lower tail.
MassResult layer_cake_mass(const AlphaConcaveFunction& f) {
  const double fmax = f.max_value();
  const double a = f.alpha().is_inf() ? 0.0 : f.alpha().value();
  double t_cut = 0.0, tail = 0.0;
  if (a <= 0.0 && !f.alpha().is_inf()) {
    t_cut = 1e-12 * fmax;
    double vol_cut = levelset_volume(f, t_cut);
    double factor = a < 0.0 ? 2.0 / (1.0 - (-a) * f.dim() / 2.0) : 2.0;
    tail = factor * t_cut * std::max(vol_cut, 1.0);
  }
  auto integrand = [&](double t) { return t <= 0.0 ? 0.0 : levelset_volume(f, t); };
  QuadResult rough = adaptive_simpson(integrand, t_cut, fmax, 1e-4 * fmax, 20);
  double tol = 1e-10 * (1.0 + std::abs(rough.value));
  QuadResult fine = adaptive_simpson(integrand, t_cut, fmax, tol, 48);
  return {fine.value, fine.error + tail + tol, MassResult::Method::LayerCake};
}

// vol{psi <= offset + 1}; cones scale as vol(s) = A1 (s-d)^n when the domain
// does not break homogeneity, which a two-point probe verifies.
bool cone_homogeneous_volume(const AlphaConcaveFunction& f, double* A1) {
  auto vol_at_s = [&](double s) {
    double t = value_of_base_level(f.transform_alpha(), s);
    return t > 0.0 ? levelset_volume(f, t) : 0.0;
  };
  const auto* c = std::get_if<ConeBase>(&f.base());
  if (!c) return false;
  double d = c->offset;
  double v1 = vol_at_s(d + 1.0);
  if (!(v1 > 0.0)) return false;
  int n = f.dim();
  for (double scale : {0.5, 2.0, 3.7}) {
    double expect = v1 * std::pow(scale, n);
    double got = vol_at_s(d + scale);
    if (std::abs(got - expect) > 1e-9 * (1.0 + expect)) return false;
  }
  *A1 = v1;
  return true;
}

double factorial(int n) { return n == 2 ? 2.0 : 1.0; }

}  // namespace

MassResult total_mass(const AlphaConcaveFunction& f) {
  const AlphaParam alpha = f.alpha();
  const int n = f.dim();

  if (auto* g = std::get_if<GridBase>(&f.base())) {
    auto [value, bound] = g->grid->mass_with_bound();
    return {value, bound, MassResult::Method::Quadrature};
  }
  if (auto* p = std::get_if<PolytopeIndicatorBase>(&f.base())) {
    double vol;
    if (n == 1) {
      double lo = kInf, hi = -kInf;
      for (const auto& v : p->vertices) {
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
      }
      vol = hi - lo;
    } else {
      Polygon poly;
      for (const auto& v : p->vertices) poly.emplace_back(v[0], v[1]);
      vol = polygon_area(convex_hull_2d(poly));
    }
    return exact(f.max_value() * vol);
  }
  if (auto* b = std::get_if<BallIndicatorBase>(&f.base())) {
    double vol = n == 1 ? 2.0 * b->radius : M_PI * b->radius * b->radius;
    return exact(f.max_value() * vol);
  }
  if (auto* w = std::get_if<PiecewiseAffineBase>(&f.base())) {
    AlphaMinorant q{f.transform_alpha(), *w->lin};
    return minorant_mass(q);
  }
  if (!alpha.is_inf() && alpha.value() == 0.0) {
    if (auto* q = std::get_if<QuadraticBase>(&f.base())) {
      double det = n == 1 ? q->Q(0, 0) : q->Q.determinant();
      double value = std::exp(-q->offset) * std::pow(M_PI, 0.5 * n) / std::sqrt(det);
      return exact(value);
    }
    if (auto* r = std::get_if<RadialConeBase>(&f.base())) {
      double value = std::exp(-r->offset) * unit_ball_volume(n) * factorial(n) /
                     std::pow(r->rate, n);
      return exact(value);
    }
    double A1 = 0.0;
    if (cone_homogeneous_volume(f, &A1)) {
      const auto* c = std::get_if<ConeBase>(&f.base());
      return exact(std::exp(-c->offset) * A1 * factorial(n));
    }
  }
  return layer_cake_mass(f);
}

double levelset_volume(const AlphaConcaveFunction& f, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("levelset_volume: level must be > 0");
  if (t > f.max_value()) return 0.0;
  return superlevel_set_descriptor(f, t).volume;
}

double lp_distance(const AlphaConcaveFunction& f, const AlphaConcaveFunction& g, double p,
                   std::int64_t resolution) {
  if (f.dim() != g.dim()) throw std::invalid_argument("lp_distance: dimension mismatch");
  if (!(p >= 1.0)) throw std::invalid_argument("lp_distance: p must be >= 1");
  if (resolution % 2 == 0) ++resolution;
  Box box = f.support_box().united(g.support_box());
  const int n = f.dim();
  if (n == 1) {
    double h = (box.hi[0] - box.lo[0]) / static_cast<double>(resolution - 1);
    std::vector<double> vals(resolution);
    for (std::int64_t i = 0; i < resolution; ++i) {
      Vec x = vec1(box.lo[0] + h * i);
      vals[i] = std::pow(std::abs(eval(f, x) - eval(g, x)), p);
    }
    return std::pow(simpson_samples(vals.data(), vals.size(), h), 1.0 / p);
  }
  double h0 = (box.hi[0] - box.lo[0]) / static_cast<double>(resolution - 1);
  double h1 = (box.hi[1] - box.lo[1]) / static_cast<double>(resolution - 1);
  std::vector<double> rows(resolution);
  std::vector<double> line(resolution);
  for (std::int64_t i = 0; i < resolution; ++i) {
    for (std::int64_t j = 0; j < resolution; ++j) {
      Vec x = vec2(box.lo[0] + h0 * i, box.lo[1] + h1 * j);
      line[j] = std::pow(std::abs(eval(f, x) - eval(g, x)), p);
    }
    rows[i] = simpson_samples(line.data(), line.size(), h1);
  }
  return std::pow(simpson_samples(rows.data(), rows.size(), h0), 1.0 / p);
}

}  // namespace mlab
