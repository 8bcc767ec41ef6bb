#include "mlab/quadrature.hpp"

#include <cmath>

namespace mlab {

namespace {

struct SimpsonPanel {
  double a, b, fa, fm, fb, coarse;
};

double panel_simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

void refine(const std::function<double(double)>& f, const SimpsonPanel& p, double tol, int depth,
            int max_depth, double& value, double& error) {
  double m = 0.5 * (p.a + p.b);
  double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
  double flm = f(lm), frm = f(rm);
  double left = panel_simpson(p.a, m, p.fa, flm, p.fm);
  double right = panel_simpson(m, p.b, p.fm, frm, p.fb);
  double fine = left + right;
  double delta = fine - p.coarse;
  if (depth >= max_depth || std::abs(delta) <= 15.0 * tol) {
    value += fine + delta / 15.0;
    error += std::abs(delta) / 15.0;
    return;
  }
  refine(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth + 1, max_depth, value, error);
  refine(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth + 1, max_depth, value, error);
}

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                            int max_depth) {
  if (a == b) return {0.0, 0.0};
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  SimpsonPanel root{a, b, fa, fm, fb, panel_simpson(a, b, fa, fm, fb)};
  QuadResult r;
  // Seed with a split so a symmetric integrand cannot fool the estimator.
  double m = 0.5 * (a + b);
  double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
  SimpsonPanel left{a, m, fa, flm, fm, panel_simpson(a, m, fa, flm, fm)};
  SimpsonPanel right{m, b, fm, frm, fb, panel_simpson(m, b, fm, frm, fb)};
  (void)root;
  refine(f, left, 0.5 * tol, 0, max_depth, r.value, r.error);
  refine(f, right, 0.5 * tol, 0, max_depth, r.value, r.error);
  return r;
}

double simpson_samples(const double* values, std::size_t count, double h) {
  if (count < 3 || count % 2 == 0)
    throw std::invalid_argument("simpson_samples: need an odd sample count >= 3");
  double sum = values[0] + values[count - 1];
  double four = 0.0, two = 0.0;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    if (i % 2 == 1)
      four += values[i];
    else
      two += values[i];
  }
  return h / 3.0 * (sum + 4.0 * four + 2.0 * two);
}

}  // namespace mlab
