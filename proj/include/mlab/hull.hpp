#pragma once

#include "mlab/geometry.hpp"
#include "mlab/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace mlab {

/// A point (x, t) with t at or above the governing convex base at x.
struct EpiPoint {
  Vec x;
  double t = 0.0;
};

struct LinearizationFacet {
  std::array<int, 3> v{-1, -1, -1};  // break-point indices; v[2] unused in 1D
  Vec grad;                          // affine map l(x) = <grad, x> + offset on the facet
  double offset = 0.0;
};

/// Piecewise affine convex function determined by the lower convex envelope of
/// vertical rays above a finite point set. Immutable after construction.
struct InnerLinearization {
  int dim = 1;
  std::vector<EpiPoint> breakPoints;        // extreme points of the epigraph, lex-sorted by x
  std::vector<LinearizationFacet> facets;   // triangulation of the domain (segments in 1D)
  bool degenerate = false;                  // measure-zero domain (single point / collinear)

  // Degenerate 2D domains keep a 1D lower hull along a line.
  Vec lineOrigin, lineDir;
  std::vector<double> chainParam, chainValue;

  double diameter = 0.0;  // lifted point cloud diameter, scales tolerances

  std::string to_json() const;
};

/// Lower convex envelope of {(x_i, t): t >= t_i}. Duplicate x's collapse to the
/// lower t. Throws DegenerateDomainError for measure-zero domains unless
/// allow_degenerate is set. With filter_break_points=false, facet corners may
/// include absorbed (non-extreme) points; masses are unaffected.
InnerLinearization inner_linearization(std::vector<EpiPoint> points, bool allow_degenerate = false,
                                       bool filter_break_points = true);

/// Facet-walk evaluation: affine value on the containing facet, +inf outside.
double eval_linearization_facets(const InnerLinearization& p, const Vec& x);

/// Independent oracle: solves min{sum l_i t_i : l >= 0, sum l_i = 1,
/// sum l_i x_i = x} by enumerating basic feasible subsets. +inf if infeasible.
double eval_linearization_lp(const std::vector<EpiPoint>& points, const Vec& x);

/// The extreme points of epi(p).
const std::vector<EpiPoint>& break_points(const InnerLinearization& p);

}  // namespace mlab
