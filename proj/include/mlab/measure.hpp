#pragma once

#include "mlab/function.hpp"
#include "mlab/types.hpp"

#include <vector>

namespace mlab {

struct MassResult {
  enum class Method { Exact, Quadrature, LayerCake };
  double value = 0.0;
  double errorBound = 0.0;
  Method method = Method::Exact;
};

/// Integration cell: a segment in 1D, a triangle in 2D.
struct Simplex {
  std::vector<Vec> vertices;

  int dim() const { return vertices.empty() ? 0 : static_cast<int>(vertices[0].size()); }
  /// Length / unsigned area.
  double measure() const;
};

struct AffineMap {
  Vec grad;
  double offset = 0.0;

  double operator()(const Vec& x) const { return grad.dot(x) + offset; }
};

/// Closed-form integral of (1 - alpha*l(x))_+^{1/alpha} (e^{-l} at alpha = 0)
/// over the simplex, by divided differences of the antiderivative kernel.
/// The (.)_+ truncation clips the simplex against 1 - alpha*l = 0 first.
MassResult mass_affine_piece(const AlphaParam& alpha, const Simplex& simplex,
                             const AffineMap& affine);

/// Sum of facet masses; exact, invariant under re-triangulation.
MassResult minorant_mass(const AlphaMinorant& q);

/// J(f): closed form for Gaussian / exponential-cone / indicator catalog
/// kinds, layer cake otherwise, grid quadrature for sampled functions.
MassResult total_mass(const AlphaConcaveFunction& f);

/// vol_n({f >= t}); 0 above the maximum.
double levelset_volume(const AlphaConcaveFunction& f, double t);

/// (integral of |f-g|^p)^{1/p} by grid quadrature on the union of supports.
double lp_distance(const AlphaConcaveFunction& f, const AlphaConcaveFunction& g, double p,
                   std::int64_t resolution = 513);

}  // namespace mlab
