#pragma once

#include "mlab/function.hpp"
#include "mlab/measure.hpp"
#include "mlab/rng.hpp"

#include <cmath>
#include <functional>

// Test-side oracles, deliberately independent of the library's closed forms.

namespace testsupport {

using mlab::Vec;

// Adaptive midpoint-refinement quadrature over a triangle: 7-point degree-5
// rule with uniform 4-way subdivision.
inline double tri_rule(const std::function<double(double, double)>& f, double ax, double ay,
                       double bx, double by, double cx, double cy) {
  static const double w0 = 9.0 / 40.0;
  static const double wa = (155.0 - std::sqrt(15.0)) / 1200.0;
  static const double wb = (155.0 + std::sqrt(15.0)) / 1200.0;
  static const double a1 = (6.0 - std::sqrt(15.0)) / 21.0;
  static const double b1 = (6.0 + std::sqrt(15.0)) / 21.0;
  struct P {
    double l0, l1, w;
  };
  const P pts[7] = {{1.0 / 3.0, 1.0 / 3.0, w0},
                    {a1, a1, wa},
                    {1.0 - 2.0 * a1, a1, wa},
                    {a1, 1.0 - 2.0 * a1, wa},
                    {b1, b1, wb},
                    {1.0 - 2.0 * b1, b1, wb},
                    {b1, 1.0 - 2.0 * b1, wb}};
  double area = 0.5 * std::abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay));
  double sum = 0.0;
  for (const auto& p : pts) {
    double x = ax + p.l0 * (bx - ax) + p.l1 * (cx - ax);
    double y = ay + p.l0 * (by - ay) + p.l1 * (cy - ay);
    sum += p.w * f(x, y);
  }
  return area * sum;  // the seven weights sum to 1
}

// Tolerance halves (rather than quarters) per level so gradient kinks along a
// line refine in polynomial rather than exponential work.
inline void tri_adapt(const std::function<double(double, double)>& f, double ax, double ay,
                      double bx, double by, double cx, double cy, double tol, int depth,
                      double& acc) {
  double coarse = tri_rule(f, ax, ay, bx, by, cx, cy);
  double mabx = 0.5 * (ax + bx), maby = 0.5 * (ay + by);
  double mbcx = 0.5 * (bx + cx), mbcy = 0.5 * (by + cy);
  double mcax = 0.5 * (cx + ax), mcay = 0.5 * (cy + ay);
  double fine = tri_rule(f, ax, ay, mabx, maby, mcax, mcay) +
                tri_rule(f, mabx, maby, bx, by, mbcx, mbcy) +
                tri_rule(f, mcax, mcay, mbcx, mbcy, cx, cy) +
                tri_rule(f, mabx, maby, mbcx, mbcy, mcax, mcay);
  if (depth > 20 || std::abs(fine - coarse) <= tol) {
    acc += fine;
    return;
  }
  tri_adapt(f, ax, ay, mabx, maby, mcax, mcay, tol / 2, depth + 1, acc);
  tri_adapt(f, mabx, maby, bx, by, mbcx, mbcy, tol / 2, depth + 1, acc);
  tri_adapt(f, mcax, mcay, mbcx, mbcy, cx, cy, tol / 2, depth + 1, acc);
  tri_adapt(f, mabx, maby, mbcx, mbcy, mcax, mcay, tol / 2, depth + 1, acc);
}

inline double integrate_triangle(const std::function<double(double, double)>& f, double ax,
                                 double ay, double bx, double by, double cx, double cy,
                                 double tol = 1e-10) {
  double acc = 0.0;
  tri_adapt(f, ax, ay, bx, by, cx, cy, tol, 0, acc);
  return acc;
}

// Adaptive Gauss-Kronrod-free 1D quadrature: Simpson pairs with refinement.
inline void seg_adapt(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double tol, int depth, double& acc) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double coarse = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth > 40 || std::abs(left + right - coarse) <= 15.0 * tol) {
    acc += left + right + (left + right - coarse) / 15.0;
    return;
  }
  seg_adapt(f, a, m, fa, flm, fm, tol / 2, depth + 1, acc);
  seg_adapt(f, m, b, fm, frm, fb, tol / 2, depth + 1, acc);
}

inline double integrate_segment(const std::function<double(double)>& f, double a, double b,
                                double tol = 1e-13) {
  double acc = 0.0;
  seg_adapt(f, a, b, f(a), f(0.5 * (a + b)), f(b), tol, 0, acc);
  return acc;
}

// The alpha transform written directly, as the oracle side.
inline double alpha_value(double alpha, double base) {
  if (alpha == 0.0) return std::exp(-base);
  double w = 1.0 - alpha * base;
  if (w <= 0.0) return 0.0;
  return std::pow(w, 1.0 / alpha);
}

inline Vec rand_point(mlab::Rng& rng, const mlab::Box& box) {
  Vec x(box.dim());
  for (int i = 0; i < box.dim(); ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
  return x;
}

}  // namespace testsupport
