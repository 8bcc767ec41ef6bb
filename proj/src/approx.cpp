#include "mlab/approx.hpp"

#include "mlab/parallel.hpp"
#include "mlab/rng.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace mlab {

namespace {

// ---------------------------------------------------------------------------
// Objective: params are the concatenated break-point coordinates; heights sit
// on the graph (free heights are never better by the envelope monotonicity in
// t). Invalid candidates score -inf mass.
// ---------------------------------------------------------------------------

struct Objective {
  const AlphaConcaveFunction* f;
  int N;
  int dim;

  std::vector<Vec> to_points(const std::vector<double>& params) const {
    std::vector<Vec> pts;
    pts.reserve(N);
    for (int i = 0; i < N; ++i) {
      Vec x = dim == 1 ? vec1(params[i]) : vec2(params[2 * i], params[2 * i + 1]);
      pts.push_back(project_into_support(*f, x));
    }
    return pts;
  }

  double mass_of_points(const std::vector<Vec>& pts) const {
    const AlphaParam ta = f->transform_alpha();
    std::vector<EpiPoint> epi;
    epi.reserve(pts.size());
    for (const auto& x : pts) {
      double y = eval(*f, x);
      if (!(y > 0.0)) {
        Vec pulled = x + 1e-6 * (f->peak() - x);
        y = eval(*f, pulled);
        if (!(y > 0.0)) continue;
        epi.push_back({pulled, base_level_of_value(ta, y)});
        continue;
      }
      epi.push_back({x, base_level_of_value(ta, y)});
    }
    if (epi.empty()) return 0.0;
    try {
      AlphaMinorant q = minorant_from_epi_points(ta, std::move(epi), true, false);
      return minorant_mass(q).value;
    } catch (const HullError&) {
      return -kInf;
    }
  }

  double operator()(const std::vector<double>& params) const {
    return -mass_of_points(to_points(params));  // minimized
  }
};

// Plain Nelder-Mead with reflection/expansion/contraction/shrink.
std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& fn, std::vector<double> start,
    double step, int max_iter) {
  const int D = static_cast<int>(start.size());
  std::vector<std::vector<double>> simplex(D + 1, start);
  for (int i = 0; i < D; ++i) simplex[i + 1][i] += step;
  std::vector<double> values(D + 1);
  for (int i = 0; i <= D; ++i) values[i] = fn(simplex[i]);

  auto order = [&] {
    std::vector<int> idx(D + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> v2;
    for (int i : idx) {
      s2.push_back(simplex[i]);
      v2.push_back(values[i]);
    }
    simplex.swap(s2);
    values.swap(v2);
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    order();
    if (std::abs(values[D] - values[0]) <= 1e-12 * (1.0 + std::abs(values[0]))) break;
    std::vector<double> centroid(D, 0.0);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) centroid[j] += simplex[i][j] / D;
    auto blend = [&](double coef) {
      std::vector<double> p(D);
      for (int j = 0; j < D; ++j) p[j] = centroid[j] + coef * (centroid[j] - simplex[D][j]);
      return p;
    };
    std::vector<double> xr = blend(1.0);
    double fr = fn(xr);
    if (fr < values[0]) {
      std::vector<double> xe = blend(2.0);
      double fe = fn(xe);
      if (fe < fr) {
        simplex[D] = xe;
        values[D] = fe;
      } else {
        simplex[D] = xr;
        values[D] = fr;
      }
    } else if (fr < values[D - 1]) {
      simplex[D] = xr;
      values[D] = fr;
    } else {
      bool outside = fr < values[D];
      std::vector<double> xc = blend(outside ? 0.5 : -0.5);
      double fc = fn(xc);
      if (fc < (outside ? fr : values[D])) {
        simplex[D] = xc;
        values[D] = fc;
      } else {
        for (int i = 1; i <= D; ++i) {
          for (int j = 0; j < D; ++j) simplex[i][j] = 0.5 * (simplex[i][j] + simplex[0][j]);
          values[i] = fn(simplex[i]);
        }
      }
    }
  }
  order();
  return {simplex[0], values[0]};
}

std::vector<double> params_of_points(const std::vector<Vec>& pts, int dim) {
  std::vector<double> params;
  for (const auto& x : pts)
    for (int i = 0; i < dim; ++i) params.push_back(x[i]);
  return params;
}

// ---------------------------------------------------------------------------
// Symmetric ansatz for radial functions: break points on a regular orbit.
// ---------------------------------------------------------------------------

std::vector<Vec> orbit_points_2d(int N, double radius, bool with_center) {
  std::vector<Vec> pts;
  int ring = with_center ? N - 1 : N;
  for (int k = 0; k < ring; ++k) {
    double th = 2.0 * M_PI * k / ring;
    pts.push_back(vec2(radius * std::cos(th), radius * std::sin(th)));
  }
  if (with_center) pts.push_back(vec2(0.0, 0.0));
  return pts;
}

std::vector<Vec> orbit_points_1d(const std::vector<double>& radii, bool with_center) {
  std::vector<Vec> pts;
  for (double r : radii) {
    pts.push_back(vec1(-std::abs(r)));
    pts.push_back(vec1(std::abs(r)));
  }
  if (with_center) pts.push_back(vec1(0.0));
  return pts;
}

std::vector<Vec> symmetric_ansatz(const AlphaConcaveFunction& f, int N, int max_iter) {
  const double rmax = f.support_box().hi[0];
  Objective obj{&f, N, f.dim()};
  if (f.dim() == 2) {
    auto best_pts = orbit_points_2d(N, 0.5 * rmax, false);
    double best = -obj.mass_of_points(best_pts);
    for (bool with_center : {false, true}) {
      if (with_center && N < 4) continue;
      auto fn = [&](const std::vector<double>& p) {
        double r = std::clamp(p[0], 0.0, rmax);
        return -obj.mass_of_points(orbit_points_2d(N, r, with_center));
      };
      auto [popt, val] = nelder_mead(fn, {0.5 * rmax}, 0.25 * rmax, max_iter);
      if (val < best) {
        best = val;
        best_pts = orbit_points_2d(N, std::clamp(popt[0], 0.0, rmax), with_center);
      }
    }
    return best_pts;
  }
  // 1D: floor(N/2) mirror pairs, plus the center when N is odd.
  bool with_center = N % 2 == 1;
  int pairs = N / 2;
  if (pairs == 0) return {vec1(0.0)};
  auto fn = [&](const std::vector<double>& p) {
    std::vector<double> radii;
    for (double r : p) radii.push_back(std::clamp(std::abs(r), 0.0, rmax));
    return -obj.mass_of_points(orbit_points_1d(radii, with_center));
  };
  std::vector<double> start(pairs);
  for (int i = 0; i < pairs; ++i) start[i] = rmax * (i + 1) / (pairs + 1);
  auto [popt, val] = nelder_mead(fn, start, 0.25 * rmax, max_iter);
  (void)val;
  std::vector<double> radii;
  for (double r : popt) radii.push_back(std::clamp(std::abs(r), 0.0, rmax));
  return orbit_points_1d(radii, with_center);
}

// Measure-preserving map sending the rearranged function back onto f, exact
// for quadratic bases; a peak translation otherwise.
std::vector<Vec> map_from_rearranged(const AlphaConcaveFunction& f, const std::vector<Vec>& pts) {
  std::vector<Vec> out;
  out.reserve(pts.size());
  if (auto* q = std::get_if<QuadraticBase>(&f.base())) {
    if (f.dim() == 1) {
      for (const auto& p : pts) out.push_back(q->center + p);
      return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Eigen::Matrix2d(q->Q));
    Eigen::Matrix2d isqrt = es.operatorInverseSqrt();
    double scale = std::pow(q->Q.determinant(), 0.25);
    for (const auto& p : pts) {
      Eigen::Vector2d m = scale * (isqrt * Eigen::Vector2d(p[0], p[1]));
      out.push_back(q->center + vec2(m.x(), m.y()));
    }
    return out;
  }
  for (const auto& p : pts) out.push_back(f.peak() + p);
  return out;
}

std::vector<std::vector<double>> warm_starts(const AlphaConcaveFunction& f, int N,
                                             const OptimizerConfig& cfg) {
  std::vector<std::vector<double>> starts;
  const int dim = f.dim();
  if (!cfg.warmPoints.empty()) {
    // caller-provided seed (typically the N-1 solution plus one point)
    std::vector<Vec> pts;
    for (int i = 0; i < N; ++i)
      pts.push_back(i < static_cast<int>(cfg.warmPoints.size()) ? cfg.warmPoints[i] : f.peak());
    starts.push_back(params_of_points(pts, dim));
  }
  if (cfg.symmetricAnsatz && f.is_radial()) {
    starts.push_back(params_of_points(symmetric_ansatz(f, N, cfg.maxIterations), dim));
  }
  if (auto* p = std::get_if<PolytopeIndicatorBase>(&f.base())) {
    std::vector<Vec> pts;
    for (int i = 0; i < N; ++i) pts.push_back(p->vertices[i % p->vertices.size()]);
    starts.push_back(params_of_points(pts, dim));
  }
  if (!f.is_radial() && !std::holds_alternative<GridBase>(f.base())) {
    // seed with the rearranged solution mapped back onto f
    try {
      AlphaConcaveFunction star = rearrange(f);
      auto pts = symmetric_ansatz(star, N, cfg.maxIterations);
      starts.push_back(params_of_points(map_from_rearranged(f, pts), dim));
    } catch (const std::exception&) {
      // seeding is best-effort only
    }
  }
  return starts;
}

bool lex_less_points(const std::vector<EpiPoint>& a, const std::vector<EpiPoint>& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (lex_less(a[i].x, b[i].x)) return true;
    if (lex_less(b[i].x, a[i].x)) return false;
  }
  return a.size() < b.size();
}

// Heights on the graph for a list of locations.
AlphaMinorant minorant_at_graph_heights(const AlphaConcaveFunction& f,
                                        const std::vector<Vec>& pts) {
  const AlphaParam ta = f.transform_alpha();
  std::vector<EpiPoint> epi;
  for (const auto& x : pts) {
    double y = eval(f, x);
    if (!(y > 0.0)) continue;
    epi.push_back({x, base_level_of_value(ta, y)});
  }
  if (epi.empty()) epi.push_back({f.peak(), base_level_of_value(ta, f.max_value())});
  return minorant_from_epi_points(ta, std::move(epi), true, true);
}

}  // namespace

MinorantSolution best_minorant(const AlphaConcaveFunction& f, int N, const OptimizerConfig& cfg) {
  if (N < 1) throw InvalidNError("best_minorant: N must be >= 1");
  const int dim = f.dim();
  const int D = dim * N;
  Objective obj{&f, N, dim};
  const Box box = f.support_box();
  const double diam = box.diameter();

  auto seeds = warm_starts(f, N, cfg);
  const int total = cfg.restarts + static_cast<int>(seeds.size());

  std::vector<std::vector<double>> results(total);
  std::vector<double> masses(total, -kInf);
  parallel_for(total, [&](std::size_t r) {
    std::vector<double> start;
    if (r < seeds.size()) {
      start = seeds[r];
    } else {
      Rng rng(cfg.seed * 1315423911ull + (r - seeds.size()) + 1);
      for (int i = 0; i < N; ++i)
        for (int a = 0; a < dim; ++a) start.push_back(rng.uniform(box.lo[a], box.hi[a]));
    }
    auto [best, val] = nelder_mead(obj, std::move(start), cfg.simplexScale * diam,
                                   cfg.maxIterations);
    results[r] = std::move(best);
    masses[r] = -val;
  }, cfg.jobs);

  // Deterministic aggregation: larger mass wins, ties by lexicographically
  // smaller break-point list.
  int best_idx = -1;
  AlphaMinorant best_found;
  for (int r = 0; r < total; ++r) {
    if (masses[r] == -kInf) continue;
    if (best_idx < 0 || masses[r] > masses[best_idx] + 1e-12) {
      best_found = minorant_at_graph_heights(f, obj.to_points(results[r]));
      best_idx = r;
    } else if (masses[r] > masses[best_idx] - 1e-12) {
      AlphaMinorant cand = minorant_at_graph_heights(f, obj.to_points(results[r]));
      if (lex_less_points(cand.lin.breakPoints, best_found.lin.breakPoints)) {
        best_found = std::move(cand);
        best_idx = r;
      }
    }
  }
  if (best_idx < 0) throw std::runtime_error("best_minorant: every restart failed");

  MinorantSolution sol;
  sol.minorant = best_found;
  sol.mass = minorant_mass(sol.minorant);
  sol.breakPointCount = static_cast<int>(sol.minorant.lin.breakPoints.size());
  sol.seed = cfg.seed;
  sol.restartMasses.assign(masses.begin(), masses.end());
  double second = -kInf;
  for (int r = 0; r < total; ++r)
    if (r != best_idx) second = std::max(second, masses[r]);
  double spread = (second == -kInf) ? 0.0 : std::max(0.0, masses[best_idx] - second);
  sol.optimizerGap = spread + sol.mass.errorBound;
  return sol;
}

namespace {

// Exhaustive pass: either unordered combinations of one shared node list, or
// the product of per-slot node lists (zoom stages).
void brute_force_pass(const Objective& obj, const std::vector<std::vector<Vec>>& slot_nodes,
                      bool shared, std::int64_t budget, std::vector<Vec>& best_pts,
                      double& best_mass) {
  const int N = static_cast<int>(slot_nodes.size());
  double combos = 1.0;
  if (shared) {
    double m = static_cast<double>(slot_nodes[0].size());
    for (int s = 0; s < N; ++s) combos = combos * (m - s) / (s + 1);
  } else {
    for (const auto& nodes : slot_nodes) combos *= static_cast<double>(nodes.size());
  }
  if (combos > static_cast<double>(budget))
    throw BudgetExceededError("brute_force_minorant: enumeration exceeds budget");

  std::vector<int> idx(N, 0);
  if (shared)
    for (int s = 0; s < N; ++s) idx[s] = s;
  if (shared && static_cast<int>(slot_nodes[0].size()) < N) return;
  std::vector<Vec> pts(N, slot_nodes[0][0]);
  for (;;) {
    for (int s = 0; s < N; ++s) pts[s] = slot_nodes[shared ? 0 : s][idx[s]];
    double mass = obj.mass_of_points(pts);
    if (mass > best_mass) {
      best_mass = mass;
      best_pts = pts;
    }
    int s = N - 1;
    if (shared) {
      int limit = static_cast<int>(slot_nodes[0].size());
      while (s >= 0 && idx[s] == limit - (N - s)) --s;
      if (s < 0) break;
      ++idx[s];
      for (int k = s + 1; k < N; ++k) idx[k] = idx[k - 1] + 1;
    } else {
      while (s >= 0 && idx[s] + 1 == static_cast<int>(slot_nodes[s].size())) {
        idx[s] = 0;
        --s;
      }
      if (s < 0) break;
      ++idx[s];
    }
  }
}

std::vector<Vec> grid_nodes(const Box& window, int dim, int res) {
  std::vector<Vec> nodes;
  if (dim == 1) {
    for (int i = 0; i < res; ++i)
      nodes.push_back(vec1(window.lo[0] + (window.hi[0] - window.lo[0]) * i / (res - 1)));
    return nodes;
  }
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j)
      nodes.push_back(vec2(window.lo[0] + (window.hi[0] - window.lo[0]) * i / (res - 1),
                           window.lo[1] + (window.hi[1] - window.lo[1]) * j / (res - 1)));
  return nodes;
}

}  // namespace

MinorantSolution brute_force_minorant(const AlphaConcaveFunction& f, int N, int gridResolution,
                                      int zoomStages, std::int64_t budget) {
  if (N < 1) throw InvalidNError("brute_force_minorant: N must be >= 1");
  if (gridResolution < 2) throw std::invalid_argument("brute_force_minorant: grid too small");
  const int dim = f.dim();
  const Box box = f.support_box();
  Objective obj{&f, N, dim};

  std::vector<Vec> best_pts;
  double best_mass = -kInf;
  {
    std::vector<std::vector<Vec>> slots(N, grid_nodes(box, dim, gridResolution));
    brute_force_pass(obj, slots, true, budget, best_pts, best_mass);
  }

  const int zoom_res = 9;
  std::vector<double> h(dim);
  for (int a = 0; a < dim; ++a) h[a] = (box.hi[a] - box.lo[a]) / (gridResolution - 1);
  for (int stage = 1; stage < zoomStages; ++stage) {
    std::vector<std::vector<Vec>> slots;
    for (int s = 0; s < N; ++s) {
      Box w;
      w.lo.resize(dim);
      w.hi.resize(dim);
      for (int a = 0; a < dim; ++a) {
        w.lo[a] = best_pts[s][a] - 2.0 * h[a];
        w.hi[a] = best_pts[s][a] + 2.0 * h[a];
      }
      slots.push_back(grid_nodes(w, dim, zoom_res));
    }
    brute_force_pass(obj, slots, false, budget, best_pts, best_mass);
    for (int a = 0; a < dim; ++a) h[a] = 4.0 * h[a] / (zoom_res - 1);
  }

  MinorantSolution sol;
  sol.minorant = minorant_at_graph_heights(f, best_pts);
  sol.mass = minorant_mass(sol.minorant);
  sol.breakPointCount = static_cast<int>(sol.minorant.lin.breakPoints.size());
  sol.optimizerGap = sol.mass.errorBound;
  sol.restartMasses = {best_mass};
  return sol;
}

GValue g_functional(const AlphaConcaveFunction& f, int N, const OptimizerConfig& cfg) {
  MinorantSolution sol = best_minorant(f, N, cfg);
  MassResult J = total_mass(f);
  GValue g;
  g.value = J.value - sol.mass.value;
  g.gap = sol.optimizerGap + J.errorBound + sol.mass.errorBound;
  return g;
}

MacbeathTriple macbeath_pair(const AlphaConcaveFunction& f, const Hyperplane& H,
                             const std::vector<SymmetralPoint>& pts) {
  const Vec u = H.normal / H.normal.norm();
  const AlphaParam ta = f.transform_alpha();
  std::vector<EpiPoint> p_pts, q_pts, r_pts;
  for (const auto& sp : pts) {
    ChordBounds cb = chord_bounds(f, H, sp.base);
    double halfwidth = 0.5 * (cb.upper - cb.lower);
    double scale = 1.0 + std::abs(cb.upper) + std::abs(cb.lower);
    if (std::abs(sp.offset) > halfwidth + 1e-9 * scale)
      throw PointOutsideSymmetralError("macbeath_pair: |t| exceeds half the chord length");
    double mid = 0.5 * (cb.upper + cb.lower);
    double t_epi = base_level_of_value(ta, sp.base.height);
    p_pts.push_back({sp.base.foot + sp.offset * u, t_epi});
    q_pts.push_back({sp.base.foot + (sp.offset + mid) * u, t_epi});
    r_pts.push_back({sp.base.foot + (-sp.offset + mid) * u, t_epi});
  }
  MacbeathTriple out;
  out.p = minorant_from_epi_points(ta, std::move(p_pts), true, true);
  out.q = minorant_from_epi_points(ta, std::move(q_pts), true, true);
  out.r = minorant_from_epi_points(ta, std::move(r_pts), true, true);
  out.massP = minorant_mass(out.p);
  out.massQ = minorant_mass(out.q);
  out.massR = minorant_mass(out.r);
  return out;
}

SteinerMonotonicityReport steiner_monotonicity_check(const AlphaConcaveFunction& f,
                                                     const Hyperplane& H, int N,
                                                     const OptimizerConfig& cfg) {
  const Vec u = H.normal / H.normal.norm();
  AlphaConcaveFunction sym = steiner_symmetrize(f, H);
  MinorantSolution on_sym = best_minorant(sym, N, cfg);
  MinorantSolution on_f = best_minorant(f, N, cfg);

  // Lift the symmetral break points; clamp into the admissible set so the
  // certificate is evaluated on exactly admissible data.
  std::vector<SymmetralPoint> pts;
  for (const auto& bp : on_sym.minorant.lin.breakPoints) {
    double y = value_of_base_level(on_sym.minorant.alpha, bp.t);
    double s_off = u.dot(bp.x);
    Vec foot = bp.x - s_off * u;
    // height clamp: the chord of f at this foot must reach y
    double t_hi = f.max_value();
    double t_lo = 0.0;
    auto has_chord = [&](double t) {
      return t > 0.0 && superlevel_chord(f, foot, u, t).has_value();
    };
    if (!has_chord(y)) {
      // bisect the largest admissible height
      double lo = 0.0, hi = std::min(y, f.max_value());
      if (!has_chord(1e-300)) continue;  // foot outside proj hyp(f): drop
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (has_chord(mid))
          lo = mid;
        else
          hi = mid;
      }
      y = 0.999999 * lo;
      if (!(y > 0.0)) continue;
    }
    (void)t_hi;
    (void)t_lo;
    auto chord = superlevel_chord(f, foot, u, y);
    double half = 0.5 * (chord->second - chord->first);
    SymmetralPoint sp;
    sp.base = LiftedPoint{foot, y};
    sp.offset = std::clamp(s_off, -half, half);
    pts.push_back(sp);
  }

  SteinerMonotonicityReport rep;
  rep.bestMassOriginal = on_f.mass;
  rep.bestMassSymmetral = on_sym.mass;
  rep.optimizerGap = on_f.optimizerGap + on_sym.optimizerGap;
  if (pts.empty()) {
    rep.certificateHolds = true;  // nothing to certify
    return rep;
  }
  MacbeathTriple triple = macbeath_pair(f, H, pts);
  rep.massP = triple.massP.value;
  rep.massQ = triple.massQ.value;
  rep.massR = triple.massR.value;
  rep.certificateSlack = std::max(rep.massQ, rep.massR) - rep.massP;
  double bounds = triple.massP.errorBound + triple.massQ.errorBound + triple.massR.errorBound;
  rep.certificateHolds = rep.certificateSlack >= -bounds;
  return rep;
}

std::string MinorantSolution::to_json() const {
  nlohmann::json j;
  j["linearization"] = nlohmann::json::parse(minorant.lin.to_json());
  j["alpha"] = minorant.alpha.is_inf() ? nlohmann::json("inf")
                                       : nlohmann::json(minorant.alpha.value());
  j["mass"] = mass.value;
  j["mass_error_bound"] = mass.errorBound;
  j["break_point_count"] = breakPointCount;
  j["optimizer_gap"] = optimizerGap;
  j["seed"] = seed;
  j["restart_masses"] = restartMasses;
  return j.dump();
}

}  // namespace mlab
