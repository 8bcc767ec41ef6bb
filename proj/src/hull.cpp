#include "mlab/hull.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace mlab {

namespace {

double cloud_diameter(const std::vector<EpiPoint>& pts) {
  Vec lo = pts[0].x, hi = pts[0].x;
  double tlo = pts[0].t, thi = pts[0].t;
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p.x);
    hi = hi.cwiseMax(p.x);
    tlo = std::min(tlo, p.t);
    thi = std::max(thi, p.t);
  }
  double d2 = (hi - lo).squaredNorm() + (thi - tlo) * (thi - tlo);
  return std::sqrt(d2);
}

std::vector<EpiPoint> dedupe_points(std::vector<EpiPoint> pts, double xtol) {
  std::sort(pts.begin(), pts.end(), [](const EpiPoint& a, const EpiPoint& b) {
    if (a.x.size() != b.x.size()) return a.x.size() < b.x.size();
    for (int i = 0; i < a.x.size(); ++i) {
      if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
    }
    return a.t < b.t;
  });
  std::vector<EpiPoint> out;
  for (auto& p : pts) {
    if (!out.empty() && (out.back().x - p.x).norm() <= xtol) {
      out.back().t = std::min(out.back().t, p.t);  // duplicate x: LP semantics keep min t
    } else {
      out.push_back(p);
    }
  }
  return out;
}

// Lower chain over points sorted by abscissa; returns indices of chain vertices.
std::vector<int> lower_chain_1d(const std::vector<double>& xs, const std::vector<double>& ts,
                                double eps_area) {
  std::vector<int> chain;
  for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
    while (chain.size() >= 2) {
      int a = chain[chain.size() - 2], b = chain[chain.size() - 1];
      // keep b only if it turns strictly below the chord a->i
      double cross = (xs[b] - xs[a]) * (ts[i] - ts[a]) - (xs[i] - xs[a]) * (ts[b] - ts[a]);
      if (cross <= eps_area)
        chain.pop_back();  // b on or above chord: absorbed
      else
        break;
    }
    chain.push_back(i);
  }
  return chain;
}

InnerLinearization build_1d(std::vector<EpiPoint> pts, double diam) {
  InnerLinearization lin;
  lin.dim = 1;
  lin.diameter = diam;
  if (pts.size() == 1) {
    lin.degenerate = true;
    lin.breakPoints = std::move(pts);
    return lin;
  }
  std::vector<double> xs, ts;
  for (const auto& p : pts) {
    xs.push_back(p.x[0]);
    ts.push_back(p.t);
  }
  double eps_area = 1e-12 * (1.0 + diam) * (1.0 + diam);
  auto chain = lower_chain_1d(xs, ts, eps_area);
  for (int idx : chain) lin.breakPoints.push_back(pts[idx]);
  for (std::size_t i = 0; i + 1 < lin.breakPoints.size(); ++i) {
    const auto& a = lin.breakPoints[i];
    const auto& b = lin.breakPoints[i + 1];
    LinearizationFacet f;
    f.v = {static_cast<int>(i), static_cast<int>(i + 1), -1};
    double slope = (b.t - a.t) / (b.x[0] - a.x[0]);
    f.grad = vec1(slope);
    f.offset = a.t - slope * a.x[0];
    lin.facets.push_back(f);
  }
  return lin;
}

InnerLinearization build_degenerate_2d(std::vector<EpiPoint> pts, double diam) {
  InnerLinearization lin;
  lin.dim = 2;
  lin.degenerate = true;
  lin.diameter = diam;
  if (pts.size() == 1) {
    lin.breakPoints = std::move(pts);
    return lin;
  }
  // Points are collinear: run the 1D chain along the spanning direction.
  Vec origin = pts.front().x;
  Vec dir = pts.back().x - origin;  // pts lex-sorted, extremes span the segment
  double len = dir.norm();
  if (len == 0.0) {  // all x equal was handled by dedupe; guard anyway
    lin.breakPoints = {pts.front()};
    return lin;
  }
  dir /= len;
  std::vector<double> s(pts.size()), ts(pts.size());
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s[i] = dir.dot(pts[i].x - origin);
    ts[i] = pts[i].t;
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) { return s[a] < s[b]; });
  std::vector<double> ss, tt;
  std::vector<EpiPoint> sorted;
  for (int idx : order) {
    ss.push_back(s[idx]);
    tt.push_back(ts[idx]);
    sorted.push_back(pts[idx]);
  }
  double eps_area = 1e-12 * (1.0 + diam) * (1.0 + diam);
  auto chain = lower_chain_1d(ss, tt, eps_area);
  for (int idx : chain) {
    lin.breakPoints.push_back(sorted[idx]);
    lin.chainParam.push_back(ss[idx]);
    lin.chainValue.push_back(tt[idx]);
  }
  lin.lineOrigin = origin;
  lin.lineDir = dir;
  return lin;
}

struct PlaneGroup {
  Vec grad;
  double offset;
  std::vector<int> members;  // indices, ascending
};

// Enumerates supporting planes from below; returns maximal coplanar groups.
bool enumerate_lower_planes(const std::vector<EpiPoint>& pts, double ztol, double area_tol,
                            std::vector<PlaneGroup>& groups) {
  const int n = static_cast<int>(pts.size());
  std::map<std::vector<int>, PlaneGroup> seen;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        Eigen::Vector2d e1(pts[j].x[0] - pts[i].x[0], pts[j].x[1] - pts[i].x[1]);
        Eigen::Vector2d e2(pts[k].x[0] - pts[i].x[0], pts[k].x[1] - pts[i].x[1]);
        double det = cross2(e1, e2);
        if (std::abs(det) <= area_tol) continue;
        double d1 = pts[j].t - pts[i].t, d2 = pts[k].t - pts[i].t;
        // grad solves [e1; e2] grad = [d1; d2]
        Vec g = vec2((d1 * e2.y() - d2 * e1.y()) / det, (d2 * e1.x() - d1 * e2.x()) / det);
        double b = pts[i].t - g.dot(pts[i].x);
        bool supporting = true;
        std::vector<int> members;
        for (int l = 0; l < n; ++l) {
          double gap = pts[l].t - (g.dot(pts[l].x) + b);
          if (gap < -ztol) {
            supporting = false;
            break;
          }
          if (gap <= ztol) members.push_back(l);
        }
        if (!supporting) continue;
        auto [it, inserted] = seen.try_emplace(members);
        if (inserted) it->second = PlaneGroup{g, b, members};
      }
    }
  }
  groups.clear();
  // Drop groups whose member set is contained in a larger group.
  std::vector<PlaneGroup> all;
  for (auto& [key, g] : seen) all.push_back(g);
  for (std::size_t a = 0; a < all.size(); ++a) {
    bool subset = false;
    for (std::size_t b = 0; b < all.size() && !subset; ++b) {
      if (a == b || all[a].members.size() >= all[b].members.size()) continue;
      subset = std::includes(all[b].members.begin(), all[b].members.end(),
                             all[a].members.begin(), all[a].members.end());
    }
    if (!subset) groups.push_back(all[a]);
  }
  return !groups.empty();
}

InnerLinearization build_2d(std::vector<EpiPoint> pts, double diam) {
  InnerLinearization lin;
  lin.dim = 2;
  lin.diameter = diam;
  lin.breakPoints = std::move(pts);
  const auto& bp = lin.breakPoints;

  std::vector<Eigen::Vector2d> xs;
  for (const auto& p : bp) xs.emplace_back(p.x[0], p.x[1]);
  Polygon domain = convex_hull_2d(xs, 1e-12 * (1.0 + diam) * (1.0 + diam));
  double domain_area = polygon_area(domain);

  double ztol = 1e-12 * (1.0 + diam);
  double area_tol = 1e-12 * (1.0 + diam) * (1.0 + diam);
  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<PlaneGroup> groups;
    if (!enumerate_lower_planes(bp, ztol, area_tol, groups)) {
      ztol *= 8.0;
      continue;
    }
    std::vector<LinearizationFacet> facets;
    double covered = 0.0;
    bool ok = true;
    for (const auto& g : groups) {
      std::vector<Eigen::Vector2d> gx;
      for (int idx : g.members) gx.emplace_back(bp[idx].x[0], bp[idx].x[1]);
      Polygon poly = convex_hull_2d(gx, area_tol);
      if (poly.size() < 3) continue;  // edge-only group, no area
      // map polygon corners back to break-point indices
      std::vector<int> ring;
      for (const auto& v : poly) {
        int best = -1;
        double bd = kInf;
        for (int idx : g.members) {
          double d = (Eigen::Vector2d(bp[idx].x[0], bp[idx].x[1]) - v).norm();
          if (d < bd) {
            bd = d;
            best = idx;
          }
        }
        if (best < 0 || bd > 1e-9 * (1.0 + diam)) {
          ok = false;
          break;
        }
        ring.push_back(best);
      }
      if (!ok) break;
      // lexicographic fan: rotate the ring so the lex-smallest corner leads
      std::size_t lead = 0;
      for (std::size_t i = 1; i < ring.size(); ++i)
        if (lex_less(bp[ring[i]].x, bp[ring[lead]].x)) lead = i;
      std::rotate(ring.begin(), ring.begin() + lead, ring.end());
      for (std::size_t i = 1; i + 1 < ring.size(); ++i) {
        LinearizationFacet f;
        f.v = {ring[0], static_cast<int>(ring[i]), static_cast<int>(ring[i + 1])};
        f.grad = g.grad;
        f.offset = g.offset;
        facets.push_back(f);
        Eigen::Vector2d a(bp[ring[0]].x[0], bp[ring[0]].x[1]);
        Eigen::Vector2d b(bp[ring[i]].x[0], bp[ring[i]].x[1]);
        Eigen::Vector2d c(bp[ring[i + 1]].x[0], bp[ring[i + 1]].x[1]);
        covered += 0.5 * std::abs(cross2(b - a, c - a));
      }
    }
    if (ok && std::abs(covered - domain_area) <= 1e-9 * (1.0 + domain_area)) {
      lin.facets = std::move(facets);
      return lin;
    }
    ztol *= 8.0;
  }
  throw HullError("inner_linearization: facet enumeration failed to tile the domain");
}

bool points_collinear_2d(const std::vector<EpiPoint>& pts, double diam) {
  if (pts.size() < 3) return true;
  double tol = 1e-12 * (1.0 + diam) * (1.0 + diam);
  const Vec& a = pts[0].x;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      Eigen::Vector2d u(pts[i].x[0] - a[0], pts[i].x[1] - a[1]);
      Eigen::Vector2d v(pts[j].x[0] - a[0], pts[j].x[1] - a[1]);
      if (std::abs(cross2(u, v)) > tol) return false;
    }
  }
  return true;
}

// Envelope value over `pts` excluding index `skip`; +inf when infeasible.
double lp_value_excluding(const std::vector<EpiPoint>& pts, int skip, const Vec& x);

}  // namespace

InnerLinearization inner_linearization(std::vector<EpiPoint> points, bool allow_degenerate,
                                       bool filter_break_points) {
  if (points.empty()) throw std::invalid_argument("inner_linearization: empty point set");
  const int dim = static_cast<int>(points[0].x.size());
  for (const auto& p : points) {
    if (static_cast<int>(p.x.size()) != dim || !std::isfinite(p.t))
      throw std::invalid_argument("inner_linearization: inconsistent or non-finite point");
  }
  double diam = cloud_diameter(points);
  points = dedupe_points(std::move(points), 1e-12 * (1.0 + diam));

  bool degenerate = (dim == 1) ? points.size() == 1 : points_collinear_2d(points, diam);
  if (degenerate && !allow_degenerate)
    throw DegenerateDomainError("inner_linearization: points span a degenerate domain");

  if (filter_break_points && points.size() > 1) {
    double tol = 1e-9 * (1.0 + diam);
    std::vector<EpiPoint> extremes;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double rest = lp_value_excluding(points, static_cast<int>(i), points[i].x);
      if (rest > points[i].t + tol) extremes.push_back(points[i]);
    }
    points = std::move(extremes);
  }

  if (dim == 1) return build_1d(std::move(points), diam);
  if (degenerate || points_collinear_2d(points, diam))
    return build_degenerate_2d(std::move(points), diam);
  return build_2d(std::move(points), diam);
}

double eval_linearization_facets(const InnerLinearization& p, const Vec& x) {
  double tol = 1e-9 * (1.0 + p.diameter);
  if (p.degenerate) {
    if (p.breakPoints.size() == 1)
      return (x - p.breakPoints[0].x).norm() <= tol ? p.breakPoints[0].t : kInf;
    if (p.dim == 2) {
      Vec rel = x - p.lineOrigin;
      double s = p.lineDir.dot(rel);
      double perp = (rel - s * p.lineDir).norm();
      if (perp > tol) return kInf;
      if (s < p.chainParam.front() - tol || s > p.chainParam.back() + tol) return kInf;
      s = std::clamp(s, p.chainParam.front(), p.chainParam.back());
      auto it = std::upper_bound(p.chainParam.begin(), p.chainParam.end(), s);
      std::size_t hi = std::min<std::size_t>(p.chainParam.size() - 1,
                                             static_cast<std::size_t>(it - p.chainParam.begin()));
      std::size_t lo = hi == 0 ? 0 : hi - 1;
      if (hi == lo) return p.chainValue[lo];
      double w = (s - p.chainParam[lo]) / (p.chainParam[hi] - p.chainParam[lo]);
      return (1.0 - w) * p.chainValue[lo] + w * p.chainValue[hi];
    }
  }
  if (p.dim == 1) {
    double lo = p.breakPoints.front().x[0], hi = p.breakPoints.back().x[0];
    if (x[0] < lo - tol || x[0] > hi + tol) return kInf;
    double xv = std::clamp(x[0], lo, hi);
    for (const auto& f : p.facets) {
      if (xv >= p.breakPoints[f.v[0]].x[0] - tol && xv <= p.breakPoints[f.v[1]].x[0] + tol)
        return f.grad[0] * xv + f.offset;
    }
    return kInf;
  }
  for (const auto& f : p.facets) {
    Eigen::Vector2d a(p.breakPoints[f.v[0]].x[0], p.breakPoints[f.v[0]].x[1]);
    Eigen::Vector2d b(p.breakPoints[f.v[1]].x[0], p.breakPoints[f.v[1]].x[1]);
    Eigen::Vector2d c(p.breakPoints[f.v[2]].x[0], p.breakPoints[f.v[2]].x[1]);
    Eigen::Vector2d q(x[0], x[1]);
    double det = cross2(b - a, c - a);
    if (std::abs(det) == 0.0) continue;
    double l1 = cross2(q - a, c - a) / det;
    double l2 = cross2(b - a, q - a) / det;
    double l0 = 1.0 - l1 - l2;
    constexpr double bary_tol = 1e-9;
    if (l0 >= -bary_tol && l1 >= -bary_tol && l2 >= -bary_tol) return f.grad.dot(x) + f.offset;
  }
  return kInf;
}

namespace {

// Shared subset-enumeration core for the exact small LP.
double lp_enumerate(const std::vector<EpiPoint>& pts, const std::vector<int>& idx, const Vec& x,
                    double diam) {
  const int dim = static_cast<int>(x.size());
  double tol = 1e-9 * (1.0 + diam);
  double best = kInf;
  const int m = static_cast<int>(idx.size());
  // singletons
  for (int i = 0; i < m; ++i)
    if ((pts[idx[i]].x - x).norm() <= tol) best = std::min(best, pts[idx[i]].t);
  // pairs: x on the segment
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const Vec& a = pts[idx[i]].x;
      const Vec& b = pts[idx[j]].x;
      Vec ab = b - a;
      double len2 = ab.squaredNorm();
      if (len2 <= tol * tol) continue;
      double lam = ab.dot(x - a) / len2;
      if (lam < -1e-12 || lam > 1.0 + 1e-12) continue;
      if ((a + lam * ab - x).norm() > tol) continue;
      best = std::min(best, (1.0 - lam) * pts[idx[i]].t + lam * pts[idx[j]].t);
    }
  }
  if (dim == 2) {
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        for (int k = j + 1; k < m; ++k) {
          Eigen::Vector2d a(pts[idx[i]].x[0], pts[idx[i]].x[1]);
          Eigen::Vector2d b(pts[idx[j]].x[0], pts[idx[j]].x[1]);
          Eigen::Vector2d c(pts[idx[k]].x[0], pts[idx[k]].x[1]);
          Eigen::Vector2d q(x[0], x[1]);
          double det = cross2(b - a, c - a);
          if (std::abs(det) <= 1e-14 * (1.0 + diam) * (1.0 + diam)) continue;
          double l1 = cross2(q - a, c - a) / det;
          double l2 = cross2(b - a, q - a) / det;
          double l0 = 1.0 - l1 - l2;
          if (l0 < -1e-12 || l1 < -1e-12 || l2 < -1e-12) continue;
          best = std::min(best, l0 * pts[idx[i]].t + l1 * pts[idx[j]].t + l2 * pts[idx[k]].t);
        }
      }
    }
  }
  return best;
}

double lp_value_excluding(const std::vector<EpiPoint>& pts, int skip, const Vec& x) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i)
    if (i != skip) idx.push_back(i);
  return lp_enumerate(pts, idx, x, cloud_diameter(pts));
}

}  // namespace

double eval_linearization_lp(const std::vector<EpiPoint>& points, const Vec& x) {
  if (points.empty()) return kInf;
  std::vector<int> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  return lp_enumerate(points, idx, x, cloud_diameter(points));
}

const std::vector<EpiPoint>& break_points(const InnerLinearization& p) { return p.breakPoints; }

std::string InnerLinearization::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  j["degenerate"] = degenerate;
  nlohmann::json bps = nlohmann::json::array();
  for (const auto& b : breakPoints) {
    nlohmann::json e;
    e["x"] = std::vector<double>(b.x.data(), b.x.data() + b.x.size());
    e["t"] = b.t;
    bps.push_back(e);
  }
  j["break_points"] = bps;
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : facets) {
    nlohmann::json e;
    e["vertices"] = dim == 1 ? std::vector<int>{f.v[0], f.v[1]}
                             : std::vector<int>{f.v[0], f.v[1], f.v[2]};
    e["grad"] = std::vector<double>(f.grad.data(), f.grad.data() + f.grad.size());
    e["offset"] = f.offset;
    fs.push_back(e);
  }
  j["facets"] = fs;
  return j.dump();
}

}  // namespace mlab
