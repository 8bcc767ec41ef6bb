#pragma once

#include "mlab/alpha.hpp"
#include "mlab/geometry.hpp"
#include "mlab/grid.hpp"
#include "mlab/hull.hpp"
#include "mlab/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mlab {

/// Closed halfspace {x : <normal, x> <= offset} in R^n.
struct HalfSpace {
  Vec normal;
  double offset = 0.0;
};

// ---------------------------------------------------------------------------
// Base function kinds: convex, lsc, coercive psi with o in dom(psi).
// ---------------------------------------------------------------------------

/// psi(x) = (x-c)' Q (x-c) + d with Q positive definite.
struct QuadraticBase {
  Mat Q;
  Vec center;
  double offset = 0.0;
};

/// psi(x) = d + max_i <g_i, x-c> on the domain polyhedron, +inf outside.
struct ConeBase {
  Vec center;
  double offset = 0.0;
  std::vector<Vec> gradients;
  std::vector<HalfSpace> domain;  // empty = all of R^n
};

/// psi(x) = d + rate * ||x||; the rearranged form of cones.
struct RadialConeBase {
  double rate = 1.0;
  double offset = 0.0;
  int dim = 1;
};

/// psi = d on the polytope spanned by `vertices`, +inf outside (I_K + d).
struct PolytopeIndicatorBase {
  std::vector<Vec> vertices;
  double offset = 0.0;
};

/// psi = d on the centered ball of given radius, +inf outside.
struct BallIndicatorBase {
  double radius = 1.0;
  double offset = 0.0;
  int dim = 2;
};

/// psi is an inner linearization (+inf outside its domain).
struct PiecewiseAffineBase {
  std::shared_ptr<const InnerLinearization> lin;
};

/// Sampled function values on a box grid; the universal fallback carrier.
struct GridBase {
  GridPtr grid;
};

/// Radial function-value profile: f(x) = interp(||x||), 0 beyond the table.
/// Radii ascending, values nonincreasing.
struct RadialProfileBase {
  std::vector<double> radii;
  std::vector<double> values;
  int dim = 1;
  double tail_bound = 0.0;  // mass beyond the last radius
};

using BaseFunction = std::variant<QuadraticBase, ConeBase, RadialConeBase, PolytopeIndicatorBase,
                                  BallIndicatorBase, PiecewiseAffineBase, GridBase,
                                  RadialProfileBase>;

// ---------------------------------------------------------------------------
// Superlevel-set descriptors.
// ---------------------------------------------------------------------------

struct LevelSetDescriptor {
  enum class Kind { Empty, Interval, Polygon, Ellipse, Ball, GridMask };
  Kind kind = Kind::Empty;
  double a = 0.0, b = 0.0;       // interval [a, b]
  Polygon polygon;               // CCW polygon
  Vec center;                    // ellipse/ball center
  Mat shape;                     // ellipse quadratic form
  double rhs = 0.0;              // ellipse {(x-c)'Q(x-c) <= rhs}
  double radius = 0.0;           // ball
  std::vector<std::uint8_t> mask;
  GridPtr grid;
  double volume = 0.0;
  double volume_bound = 0.0;     // 0 for exact descriptors
};

// ---------------------------------------------------------------------------
// AlphaConcaveFunction: f = (1 - alpha psi)_+^{1/alpha}, e^{-psi} at alpha = 0,
// a multiple of an indicator at alpha = +inf.
// ---------------------------------------------------------------------------

class AlphaConcaveFunction {
 public:
  AlphaParam alpha() const { return alpha_; }
  int dim() const { return dim_; }
  const BaseFunction& base() const { return base_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  double max_value() const { return fmax_; }
  const Vec& peak() const { return peak_; }
  /// Box holding the support up to tail_mass_bound() of mass.
  const Box& support_box() const { return support_box_; }
  double tail_mass_bound() const { return tail_bound_; }
  bool is_radial() const;

  /// The alpha actually used for the base transform; +inf maps to the log case.
  AlphaParam transform_alpha() const {
    return alpha_.is_inf() ? AlphaParam::finite(0.0) : alpha_;
  }

  friend AlphaConcaveFunction function_of_base(const AlphaParam&, BaseFunction);

 private:
  AlphaConcaveFunction() = default;
  AlphaParam alpha_;
  int dim_ = 1;
  BaseFunction base_;
  std::string name_;
  double fmax_ = 0.0;
  Vec peak_;
  Box support_box_;
  double tail_bound_ = 0.0;
};

/// Validates the base against the class invariants and wraps it.
AlphaConcaveFunction function_of_base(const AlphaParam& alpha, BaseFunction base);

/// The convex base psi with f = (1 - alpha psi)_+^{1/alpha}.
const BaseFunction& base_of_function(const AlphaConcaveFunction& f);

/// f(x); zero outside the support.
double eval(const AlphaConcaveFunction& f, const Vec& x);

/// psi(x) for the effective transform (may be +inf).
double base_value(const AlphaConcaveFunction& f, const Vec& x);

/// Exact descriptor of {x : f(x) >= t} for t > 0.
LevelSetDescriptor superlevel_set_descriptor(const AlphaConcaveFunction& f, double t);

/// {sigma : f(p + sigma u) >= t} as an interval; nullopt when empty.
std::optional<std::pair<double, double>> superlevel_chord(const AlphaConcaveFunction& f,
                                                          const Vec& p, const Vec& u, double t);

/// Projects x into (a bounded proxy of) the support; used by optimizers.
Vec project_into_support(const AlphaConcaveFunction& f, const Vec& x);

// ---------------------------------------------------------------------------
// Alpha-affine minorants.
// ---------------------------------------------------------------------------

struct HypoPoint {
  Vec x;
  double y = 0.0;  // 0 < y <= f(x)
};

/// The alpha-transform of an inner linearization of base_alpha(f).
struct AlphaMinorant {
  AlphaParam alpha;  // transform alpha (finite)
  InnerLinearization lin;
};

double minorant_eval(const AlphaMinorant& q, const Vec& x);

/// Maps hypograph points to epigraph points, builds the envelope over
/// base_alpha(f), and wraps it. Throws PointAboveGraphError / ZeroHeightError.
AlphaMinorant alpha_minorant_from_points(const AlphaConcaveFunction& f,
                                         const std::vector<HypoPoint>& pts,
                                         bool allow_degenerate = true);

/// Unvalidated construction from epigraph points (internal plumbing).
AlphaMinorant minorant_from_epi_points(const AlphaParam& transform_alpha,
                                       std::vector<EpiPoint> pts, bool allow_degenerate = true,
                                       bool filter_break_points = true);

/// Wraps a minorant as a first-class function (PiecewiseAffine base).
AlphaConcaveFunction minorant_as_function(const AlphaMinorant& q);

}  // namespace mlab
