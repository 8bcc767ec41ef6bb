#include "mlab/symmetry.hpp"

#include "mlab/parallel.hpp"
#include "mlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mlab {

namespace {

// ---------------------------------------------------------------------------
// Level-length function of a 1D piecewise-linear interpolant and its inverse.
// The rearranged profile is value(s) = sup{t : len(t) >= 2|s|}; computing it
// through the exact PWL level measure keeps the line mass of the interpolant
// and makes the operation idempotent on already symmetric-decreasing samples.
// ---------------------------------------------------------------------------

class LineRearranger {
 public:
  enum class Model { PiecewiseLinear, SampleBins };

  LineRearranger(const double* vals, std::size_t count, double h,
                 Model model = Model::PiecewiseLinear) {
    if (model == Model::SampleBins) {
      // step-function level measure: each sample owns an h-wide bin, so the
      // rearrangement permutes the sample multiset exactly
      std::vector<double> sorted(vals, vals + count);
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      top_ = sorted.empty() ? 0.0 : sorted[0];
      double len = 0.0;
      for (double v : sorted) {
        len += h;
        if (bp_.empty() || bp_.back() != v) {
          bp_.push_back(v);
          len_incl_.push_back(len);
          band_B_.push_back(0.0);
        } else {
          len_incl_.back() = len;
        }
      }
      total_ = len;
      return;
    }
    init_pwl(vals, count, h);
  }

 private:
  void init_pwl(const double* rawvals, std::size_t count, double h) {
    // Interior maxima sit between nodes; a parabolic estimate through the top
    // three samples recovers the clipped tip, otherwise iterated
    // symmetrization erodes ridges by O(h^2) per step.
    std::vector<double> vals(rawvals, rawvals + count);
    if (count >= 3) {
      std::size_t m = 0;
      for (std::size_t i = 1; i < count; ++i)
        if (vals[i] > vals[m]) m = i;
      if (m > 0 && m + 1 < count) {
        double curv = vals[m - 1] - 2.0 * vals[m] + vals[m + 1];
        if (curv < 0.0) {
          double diff = vals[m + 1] - vals[m - 1];
          double lift = -diff * diff / (8.0 * curv);
          double cap = std::max(vals[m] - vals[m - 1], vals[m] - vals[m + 1]);
          vals[m] += std::min(lift, cap);
        }
      }
    }
    // events per adjacent pair: nonflat segments activate at max and retire at
    // min; flat segments jump the constant part at their value.
    struct Event {
      double value;
      double dA, dB, dC;
    };
    std::vector<Event> events;
    events.reserve(2 * count);
    double vmax = 0.0;
    for (std::size_t i = 0; i < count; ++i) vmax = std::max(vmax, vals[i]);
    for (std::size_t i = 0; i + 1 < count; ++i) {
      double a = vals[i], b = vals[i + 1];
      double hi = std::max(a, b), lo = std::min(a, b);
      if (hi == lo) {
        events.push_back({hi, 0.0, 0.0, h});
        continue;
      }
      double slope = h / (hi - lo);
      events.push_back({hi, slope * hi, slope, 0.0});
      events.push_back({lo, -slope * hi, -slope, h});
    }
    std::sort(events.begin(), events.end(),
              [](const Event& x, const Event& y) { return x.value > y.value; });
    double A = 0.0, B = 0.0, C = 0.0;
    std::size_t i = 0;
    top_ = vmax;
    while (i < events.size()) {
      double v = events[i].value;
      while (i < events.size() && events[i].value == v) {
        A += events[i].dA;
        B += events[i].dB;
        C += events[i].dC;
        ++i;
      }
      bp_.push_back(v);
      len_incl_.push_back(C + A - B * v);
      band_B_.push_back(B);
    }
    total_ = len_incl_.empty() ? 0.0 : len_incl_.back();
  }

 public:
  double max_value() const { return top_; }
  double total_length() const { return total_; }

  /// len(t): measure of {PWL >= t}.
  double length_at(double t) const {
    if (bp_.empty() || t > bp_.front()) return 0.0;
    if (t <= bp_.back()) return total_;
    std::size_t lo = 0, hi = bp_.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (bp_[mid] >= t)
        lo = mid;
      else
        hi = mid;
    }
    return len_incl_[lo] + band_B_[lo] * (bp_[lo] - t);
  }

  /// sup{t : len(t) >= L}; 0 when L exceeds the measured extent.
  double invert(double L) const {
    if (bp_.empty()) return 0.0;
    if (L <= len_incl_.front()) return bp_.front();
    if (L > total_) return 0.0;
    // first band index with len_incl >= L
    std::size_t lo = 0, hi = bp_.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (len_incl_[mid] >= L)
        hi = mid;
      else
        lo = mid;
    }
    // len grows from len_incl_[lo] at t=bp_[lo] down through the band to
    // len_excl at bp_[hi], then possibly jumps to len_incl_[hi].
    double B = band_B_[lo];
    double len_excl_hi = len_incl_[lo] + B * (bp_[lo] - bp_[hi]);
    if (L <= len_excl_hi && B > 0.0) return bp_[lo] - (L - len_incl_[lo]) / B;
    return bp_[hi];
  }

 private:
  std::vector<double> bp_;        // descending sample values
  std::vector<double> len_incl_;  // len at bp (inclusive of jumps)
  std::vector<double> band_B_;    // slope of len below the breakpoint
  double top_ = 0.0, total_ = 0.0;
};

Box symmetric_box_1d(double radius) {
  Box b;
  b.lo = vec1(-radius);
  b.hi = vec1(radius);
  return b;
}

AlphaConcaveFunction wrap_grid(const AlphaParam& alpha, GridFunction grid) {
  return function_of_base(alpha, GridBase{std::make_shared<GridFunction>(std::move(grid))});
}

// Sample any function onto a symmetric 1D grid.
GridFunction sample_1d(const AlphaConcaveFunction& f, double radius, std::int64_t res,
                       double tail) {
  Box box = symmetric_box_1d(radius);
  double h = 2.0 * radius / static_cast<double>(res - 1);
  std::vector<double> vals(res);
  for (std::int64_t i = 0; i < res; ++i) vals[i] = eval(f, vec1(box.lo[0] + h * i));
  return GridFunction(box, {res}, std::move(vals), tail);
}

// ---------------------------------------------------------------------------
// Steiner symmetrization
// ---------------------------------------------------------------------------

AlphaConcaveFunction steiner_1d(const AlphaConcaveFunction& f, std::int64_t res) {
  if (auto* g = std::get_if<GridBase>(&f.base())) {
    const GridFunction& grid = *g->grid;
    const auto& vals = grid.values();
    LineRearranger line(vals.data(), vals.size(), grid.step(0));
    // Keep the lattice when the box is already centered so a second pass
    // reproduces the values exactly; otherwise center on a symmetric half.
    double radius = std::max(std::abs(grid.box().lo[0]), std::abs(grid.box().hi[0]));
    std::int64_t n = grid.resolution()[0];
    if (n % 2 == 0) ++n;
    double h = 2.0 * radius / static_cast<double>(n - 1);
    std::vector<double> out(n);
    const std::int64_t c = (n - 1) / 2;
    for (std::int64_t i = 0; i < n; ++i)
      out[i] = line.invert(2.0 * h * static_cast<double>(std::abs(i - c)));
    return wrap_grid(f.alpha(), GridFunction(symmetric_box_1d(radius), {n}, std::move(out),
                                             grid.tail_mass_bound()));
  }
  // catalog kinds: the exact rearrangement sampled on a symmetric grid, so the
  // 1D collapse onto rearrange() is exact at the nodes.
  AlphaConcaveFunction star = rearrange(f);
  double radius = star.support_box().padded(0.1).hi[0];
  return wrap_grid(f.alpha(), sample_1d(star, radius, res, star.tail_mass_bound()));
}

// Axis-aligned normals on grid inputs: lines are grid rows/columns, samples
// are exact and the lattice is kept, so the operation is exactly idempotent.
AlphaConcaveFunction steiner_2d_axis(const AlphaConcaveFunction& f, int axis) {
  const auto& grid = *std::get_if<GridBase>(&f.base())->grid;
  auto res = grid.resolution();
  Box box = grid.box();
  double half = std::max(std::abs(box.lo[axis]), std::abs(box.hi[axis]));
  std::int64_t n_u = res[axis];
  if (n_u % 2 == 0) ++n_u;
  double h_u = 2.0 * half / static_cast<double>(n_u - 1);
  bool same_lattice = n_u == res[axis] && std::abs(box.lo[axis] + half) <= 1e-12 * (1.0 + half) &&
                      std::abs(box.hi[axis] - half) <= 1e-12 * (1.0 + half);
  Box out_box = box;
  out_box.lo[axis] = -half;
  out_box.hi[axis] = half;
  std::int64_t n_keep = res[1 - axis];
  std::vector<double> out(n_u * n_keep);
  std::vector<std::int64_t> out_res = axis == 1 ? std::vector<std::int64_t>{n_keep, n_u}
                                                : std::vector<std::int64_t>{n_u, n_keep};
  const std::int64_t center = (n_u - 1) / 2;
  parallel_for(n_keep, [&](std::size_t li) {
    std::int64_t i = static_cast<std::int64_t>(li);
    std::vector<double> linevals(res[axis]);
    for (std::int64_t j = 0; j < res[axis]; ++j)
      linevals[j] = axis == 1 ? grid.at(i, j) : grid.at(j, i);
    LineRearranger line(linevals.data(), linevals.size(), grid.step(axis));
    for (std::int64_t j = 0; j < n_u; ++j) {
      // integer distance to the center keeps mirrored nodes bit-identical
      double b = h_u * static_cast<double>(std::abs(j - center));
      double val = line.invert(2.0 * b);
      if (axis == 1)
        out[i * n_u + j] = val;
      else
        out[j * n_keep + i] = val;
    }
  });
  (void)same_lattice;
  return wrap_grid(f.alpha(),
                   GridFunction(out_box, out_res, std::move(out), grid.tail_mass_bound()));
}

AlphaConcaveFunction steiner_2d(const AlphaConcaveFunction& f, const Hyperplane& H,
                                std::int64_t res) {
  const Vec u = H.normal / H.normal.norm();
  int axis = std::abs(std::abs(u[0]) - 1.0) <= 1e-12   ? 0
             : std::abs(std::abs(u[1]) - 1.0) <= 1e-12 ? 1
                                                       : -1;
  if (axis >= 0) {
    if (std::get_if<GridBase>(&f.base())) return steiner_2d_axis(f, axis);
    // sample the function on an axis-aligned grid first; line samples are
    // then exact and even restrictions come back unchanged at the nodes
    Box box = f.support_box().padded(0.1);
    double half = std::max(std::abs(box.lo[axis]), std::abs(box.hi[axis]));
    box.lo[axis] = -half;
    box.hi[axis] = half;
    std::int64_t k = res % 2 == 0 ? res + 1 : res;
    std::vector<double> vals(k * k);
    double h0 = (box.hi[0] - box.lo[0]) / static_cast<double>(k - 1);
    double h1 = (box.hi[1] - box.lo[1]) / static_cast<double>(k - 1);
    parallel_for(k, [&](std::size_t ii) {
      std::int64_t i = static_cast<std::int64_t>(ii);
      for (std::int64_t j = 0; j < k; ++j)
        vals[i * k + j] = eval(f, vec2(box.lo[0] + h0 * i, box.lo[1] + h1 * j));
    });
    auto sampled = wrap_grid(
        f.alpha(), GridFunction(box, {k, k}, std::move(vals), f.tail_mass_bound()));
    return steiner_2d_axis(sampled, axis);
  }
  const Vec v = vec2(-u[1], u[0]);  // spans H

  // Rotated sampling rectangle covering the (padded) support box.
  Box sup = f.support_box().padded(0.1);
  double a_lo = kInf, a_hi = -kInf, b_max = 0.0;
  for (const auto& corner : sup.corners()) {
    Vec c = vec2(corner.x(), corner.y());
    a_lo = std::min(a_lo, v.dot(c));
    a_hi = std::max(a_hi, v.dot(c));
    b_max = std::max(b_max, std::abs(u.dot(c)));
  }
  const std::int64_t k = res % 2 == 0 ? res + 1 : res;
  const double ha = (a_hi - a_lo) / static_cast<double>(k - 1);
  const double hb = 2.0 * b_max / static_cast<double>(k - 1);

  // Per-line rearrangers along direction u.
  std::vector<LineRearranger> lines;
  lines.reserve(k);
  {
    std::vector<std::vector<double>> samples(k, std::vector<double>(k));
    parallel_for(k, [&](std::size_t i) {
      double a = a_lo + ha * static_cast<double>(i);
      for (std::int64_t j = 0; j < k; ++j) {
        double b = -b_max + hb * static_cast<double>(j);
        samples[i][j] = eval(f, a * v + b * u);
      }
    });
    for (std::int64_t i = 0; i < k; ++i)
      lines.emplace_back(samples[i].data(), samples[i].size(), hb);
  }

  // Trim the output box to the populated region.
  double t_trim = 1e-14 * std::max(f.max_value(), 1e-300);
  double used_alo = kInf, used_ahi = -kInf, used_b = 0.0;
  for (std::int64_t i = 0; i < k; ++i) {
    if (lines[i].max_value() > t_trim) {
      double a = a_lo + ha * static_cast<double>(i);
      used_alo = std::min(used_alo, a - ha);
      used_ahi = std::max(used_ahi, a + ha);
      used_b = std::max(used_b, 0.5 * lines[i].length_at(t_trim) + hb);
    }
  }
  if (used_alo > used_ahi) {  // numerically zero input
    used_alo = -1.0;
    used_ahi = 1.0;
    used_b = 1.0;
  }

  Box out_box;
  out_box.lo = vec2(kInf, kInf);
  out_box.hi = vec2(-kInf, -kInf);
  for (double aa : {used_alo, used_ahi}) {
    for (double bb : {-used_b, used_b}) {
      Vec c = aa * v + bb * u;
      out_box.lo = out_box.lo.cwiseMin(c);
      out_box.hi = out_box.hi.cwiseMax(c);
    }
  }
  // Symmetric odd grid so mirrored nodes land exactly on nodes.
  double half0 = std::max(std::abs(out_box.lo[0]), std::abs(out_box.hi[0]));
  double half1 = std::max(std::abs(out_box.lo[1]), std::abs(out_box.hi[1]));
  out_box.lo = vec2(-half0, -half1);
  out_box.hi = vec2(half0, half1);

  const std::int64_t m = k;
  const std::int64_t mc = (m - 1) / 2;
  double h0 = 2.0 * half0 / static_cast<double>(m - 1);
  double h1 = 2.0 * half1 / static_cast<double>(m - 1);
  std::vector<double> out(m * m, 0.0);
  parallel_for(m, [&](std::size_t ii) {
    std::int64_t i = static_cast<std::int64_t>(ii);
    double x = h0 * static_cast<double>(i - mc);  // centered: mirrors are exact
    for (std::int64_t j = 0; j < m; ++j) {
      double y = h1 * static_cast<double>(j - mc);
      Vec p = vec2(x, y);
      double a = v.dot(p);
      double b = u.dot(p);
      double ia = (a - a_lo) / ha;
      if (ia < -1.0 || ia > static_cast<double>(k)) continue;
      std::int64_t i0 = static_cast<std::int64_t>(std::floor(ia));
      double t = ia - static_cast<double>(i0);
      // Catmull-Rom across neighbouring line profiles, exact along each line.
      double w[4];
      {
        double t2 = t * t, t3 = t2 * t;
        w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
        w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
        w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
        w[3] = 0.5 * (t3 - t2);
      }
      double val = 0.0;
      for (int q = 0; q < 4; ++q) {
        std::int64_t idx = std::clamp<std::int64_t>(i0 - 1 + q, 0, k - 1);
        val += w[q] * lines[idx].invert(2.0 * std::abs(b));
      }
      out[i * m + j] = std::max(0.0, val);
    }
  });
  double tail = f.tail_mass_bound() + t_trim * (2.0 * half0) * (2.0 * half1);
  return wrap_grid(f.alpha(),
                   GridFunction(out_box, {m, m}, std::move(out), tail));
}

}  // namespace

ChordBounds chord_bounds(const AlphaConcaveFunction& f, const Hyperplane& H,
                         const LiftedPoint& h) {
  if (!(h.height > 0.0)) throw EmptyChordError("chord_bounds: height must be positive");
  Vec u = H.normal / H.normal.norm();
  auto iv = superlevel_chord(f, h.foot, u, h.height);
  if (!iv) throw EmptyChordError("chord_bounds: base point outside hyp(f)");
  return ChordBounds{iv->first, iv->second};
}

AlphaConcaveFunction steiner_symmetrize(const AlphaConcaveFunction& f, const Hyperplane& H,
                                        std::int64_t resolution) {
  if (resolution % 2 == 0) ++resolution;
  if (f.dim() == 1) return steiner_1d(f, resolution);
  return steiner_2d(f, H, resolution);
}

// ---------------------------------------------------------------------------
// Symmetric decreasing rearrangement
// ---------------------------------------------------------------------------

namespace {

// Numeric fallback: radial profile from level-set volumes.
AlphaConcaveFunction rearrange_numeric(const AlphaConcaveFunction& f, std::int64_t table_size) {
  const int n = f.dim();
  const double kappa = unit_ball_volume(n);
  const double fmax = f.max_value();
  double t_cut = 1e-12 * fmax;

  // Grid inputs: level volumes by node counting over a sorted copy.
  std::vector<double> sorted;
  double cell = 1.0;
  const GridBase* gb = std::get_if<GridBase>(&f.base());
  if (gb) {
    sorted = gb->grid->values();
    std::sort(sorted.begin(), sorted.end());
    for (int a = 0; a < n; ++a) cell *= gb->grid->step(a);
  }
  auto vol_at = [&](double t) -> double {
    if (t > fmax) return 0.0;
    if (gb) {
      auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
      return static_cast<double>(sorted.end() - it) * cell;
    }
    return levelset_volume(f, t);
  };

  double vol_cut = vol_at(t_cut);
  double R = std::pow(std::max(vol_cut, 1e-300) / kappa, 1.0 / n);
  RadialProfileBase prof;
  prof.dim = n;
  prof.tail_bound = f.tail_mass_bound() + 4.0 * t_cut * std::max(vol_cut, 1.0);
  prof.radii.resize(table_size);
  prof.values.resize(table_size);
  for (std::int64_t i = 0; i < table_size; ++i) {
    double r = R * static_cast<double>(i) / static_cast<double>(table_size - 1);
    double target = kappa * std::pow(r, n);
    // sup{t : vol(t) >= target}, vol decreasing in t
    double lo = 0.0, hi = fmax;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (vol_at(mid) >= target)
        lo = mid;
      else
        hi = mid;
    }
    prof.radii[i] = r;
    prof.values[i] = lo;
  }
  prof.values[0] = fmax;
  // enforce monotonicity against bisection noise
  for (std::int64_t i = 1; i < table_size; ++i)
    prof.values[i] = std::min(prof.values[i], prof.values[i - 1]);
  return function_of_base(f.alpha(), std::move(prof));
}

}  // namespace

AlphaConcaveFunction rearrange(const AlphaConcaveFunction& f) {
  const int n = f.dim();
  const double kappa = unit_ball_volume(n);

  if (auto* q = std::get_if<QuadraticBase>(&f.base())) {
    // level sets are ellipsoids; the ball of equal volume has quadratic base
    // det(Q)^{1/n} ||x||^2 + d
    double det = n == 1 ? q->Q(0, 0) : q->Q.determinant();
    QuadraticBase out;
    out.Q = Mat::Identity(n, n) * std::pow(det, 1.0 / n);
    out.center = n == 1 ? vec1(0.0) : vec2(0.0, 0.0);
    out.offset = q->offset;
    return function_of_base(f.alpha(), std::move(out));
  }
  if (std::get_if<RadialConeBase>(&f.base()) || std::get_if<BallIndicatorBase>(&f.base())) {
    return f;  // already symmetric decreasing
  }
  if (auto* p = std::get_if<PolytopeIndicatorBase>(&f.base())) {
    double vol = levelset_volume(f, f.max_value());
    BallIndicatorBase ball;
    ball.radius = std::pow(vol / kappa, 1.0 / n);
    ball.offset = p->offset;
    ball.dim = n;
    return function_of_base(f.alpha(), std::move(ball));
  }
  if (std::get_if<ConeBase>(&f.base())) {
    // vol{psi <= s} = A1 (s-d)^n makes f* an isotropic cone exactly.
    double A1 = 0.0;
    {
      auto vol_at_s = [&](double s) {
        double t = value_of_base_level(f.transform_alpha(), s);
        return t > 0.0 && t <= f.max_value() ? levelset_volume(f, t) : 0.0;
      };
      const auto* c = std::get_if<ConeBase>(&f.base());
      double d = c->offset;
      double v1 = vol_at_s(d + 1.0);
      bool homogeneous = v1 > 0.0;
      for (double scale : {0.5, 2.0, 3.7, 9.25, 30.0}) {
        if (!homogeneous) break;
        double expect = v1 * std::pow(scale, n);
        double got = vol_at_s(d + scale);
        homogeneous = std::abs(got - expect) <= 1e-9 * (1.0 + expect);
      }
      if (homogeneous) {
        A1 = v1;
        RadialConeBase out;
        out.rate = std::pow(kappa / A1, 1.0 / n);
        out.offset = d;
        out.dim = n;
        return function_of_base(f.alpha(), std::move(out));
      }
    }
  }
  if (std::holds_alternative<RadialProfileBase>(f.base())) return f;
  return rearrange_numeric(f, 4097);
}

std::vector<Hyperplane> random_hyperplane_sequence(std::uint64_t seed, int n, int m) {
  if (m < 1) throw std::invalid_argument("random_hyperplane_sequence: m must be >= 1");
  Rng rng(seed);
  std::vector<Hyperplane> out;
  out.reserve(m);
  for (int i = 0; i < m; ++i) {
    if (n == 1) {
      rng.raw();  // keep the stream advancing uniformly
      out.push_back(Hyperplane{vec1(1.0)});
    } else {
      out.push_back(Hyperplane{rng.unit_vector(2)});
    }
  }
  return out;
}

ChainResult symmetrization_chain(const AlphaConcaveFunction& f,
                                 const std::vector<Hyperplane>& hyperplanes, bool record,
                                 std::int64_t resolution) {
  ChainResult result{f, {}};
  AlphaConcaveFunction star = record ? rearrange(f) : f;
  for (const auto& H : hyperplanes) {
    result.final = steiner_symmetrize(result.final, H, resolution);
    if (record)
      result.l1_to_rearrangement.push_back(lp_distance(result.final, star, 1.0, resolution));
  }
  return result;
}

}  // namespace mlab
