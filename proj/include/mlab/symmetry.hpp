#pragma once

#include "mlab/function.hpp"
#include "mlab/measure.hpp"
#include "mlab/types.hpp"

#include <cstdint>
#include <vector>

namespace mlab {

/// Hyperplane through the origin, H = u^perp.
struct Hyperplane {
  Vec normal;

  static Hyperplane from_normal(Vec u) {
    double n = u.norm();
    if (std::abs(n - 1.0) > 1e-12) {
      if (n == 0.0) throw std::invalid_argument("Hyperplane: zero normal");
      u /= n;
    }
    return Hyperplane{std::move(u)};
  }
};

/// Endpoints of the chord of hyp(f) through a lifted base point in direction u.
struct ChordBounds {
  double lower = 0.0;  // f^-
  double upper = 0.0;  // f^+
};

/// Base point in the lifted hyperplane H x R: a foot in H plus a height.
struct LiftedPoint {
  Vec foot;       // in H (orthogonal to the normal)
  double height;  // > 0
};

/// Chord {t : foot + t*u in hyp(f)} at the given height; exact for catalog
/// kinds, bisection with 1e-10 brackets on grids. Throws EmptyChordError.
ChordBounds chord_bounds(const AlphaConcaveFunction& f, const Hyperplane& H,
                         const LiftedPoint& h);

/// Steiner symmetral S_H f as a grid function: every chord of the hypograph in
/// direction u is recentred on H, preserving lengths.
AlphaConcaveFunction steiner_symmetrize(const AlphaConcaveFunction& f, const Hyperplane& H,
                                        std::int64_t resolution = 513);

/// Symmetric decreasing rearrangement f*: closed form for catalog kinds,
/// a radial profile computed from level-set volumes otherwise.
AlphaConcaveFunction rearrange(const AlphaConcaveFunction& f);

/// Deterministic uniform unit normals; in 1D every entry is H = {0}.
std::vector<Hyperplane> random_hyperplane_sequence(std::uint64_t seed, int n, int m);

struct ChainResult {
  AlphaConcaveFunction final;
  std::vector<double> l1_to_rearrangement;  // per step, when recorded
};

/// Applies the symmetrizations left to right; optionally records the L1
/// distance to f* after every step.
ChainResult symmetrization_chain(const AlphaConcaveFunction& f,
                                 const std::vector<Hyperplane>& hyperplanes, bool record,
                                 std::int64_t resolution = 513);

}  // namespace mlab
