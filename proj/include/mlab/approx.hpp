#pragma once

#include "mlab/function.hpp"
#include "mlab/measure.hpp"
#include "mlab/symmetry.hpp"
#include "mlab/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mlab {

struct OptimizerConfig {
  int restarts = 32;
  int maxIterations = 500;
  double simplexScale = 0.25;  // initial step as a fraction of the support diameter
  std::uint64_t seed = 0;
  bool symmetricAnsatz = false;  // regular-orbit reduction for radial functions
  unsigned jobs = 0;             // 0 = hardware concurrency
  std::vector<Vec> warmPoints;   // e.g. the N-1 solution; padded with the peak
};

struct MinorantSolution {
  AlphaMinorant minorant;
  MassResult mass;
  int breakPointCount = 0;
  double optimizerGap = 0.0;           // best-vs-second restart + integration bound
  std::vector<double> restartMasses;   // trace, indexed by restart
  std::uint64_t seed = 0;

  std::string to_json() const;
};

/// Maximizes J over minorants with break points on the graph of f, by
/// multi-start Nelder-Mead over the break-point locations.
MinorantSolution best_minorant(const AlphaConcaveFunction& f, int N, const OptimizerConfig& cfg);

/// Independent oracle: exhaustive grid enumeration (with deterministic zoom
/// refinement) of break-point locations, heights on the graph.
MinorantSolution brute_force_minorant(const AlphaConcaveFunction& f, int N,
                                      int gridResolution, int zoomStages = 3,
                                      std::int64_t budget = 20'000'000);

struct GValue {
  double value = 0.0;  // J(f) - best minorant mass
  double gap = 0.0;
};

GValue g_functional(const AlphaConcaveFunction& f, int N, const OptimizerConfig& cfg);

/// A point (x', t) of the symmetral hypograph: a lifted base point in H x R
/// plus the signed offset along the normal.
struct SymmetralPoint {
  LiftedPoint base;
  double offset = 0.0;
};

struct MacbeathTriple {
  AlphaMinorant p, q, r;  // minorant of S_H f and the two lifted minorants of f
  MassResult massP, massQ, massR;
};

/// The constructive pair: q from offsets t_i + (f^+ + f^-)/2, r from
/// -t_i + (f^+ + f^-)/2. Guarantees J(p) <= (J(q) + J(r))/2.
MacbeathTriple macbeath_pair(const AlphaConcaveFunction& f, const Hyperplane& H,
                             const std::vector<SymmetralPoint>& pts);

struct SteinerMonotonicityReport {
  MassResult bestMassOriginal;   // best found on f
  MassResult bestMassSymmetral;  // best found on S_H f
  double massP = 0.0, massQ = 0.0, massR = 0.0;
  double certificateSlack = 0.0;  // max(Jq, Jr) - Jp
  bool certificateHolds = false;
  double optimizerGap = 0.0;
};

/// Lifts the best symmetral minorant through macbeath_pair and verifies
/// max(J(q), J(r)) >= J(p) up to integration bounds.
SteinerMonotonicityReport steiner_monotonicity_check(const AlphaConcaveFunction& f,
                                                     const Hyperplane& H, int N,
                                                     const OptimizerConfig& cfg);

}  // namespace mlab
