#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlab {

// Points live in R^n with n in {1,2}. Dynamic-size vectors with a compile-time
// max of 2 keep everything on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::AutoAlign, 2, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::AutoAlign, 2, 2>;

inline Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Volume of the unit ball in R^n (n = 1: 2, n = 2: pi).
inline double unit_ball_volume(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return M_PI;
    default: throw std::invalid_argument("unit_ball_volume: dimension must be 1 or 2");
  }
}

struct DegenerateDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateSimplexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PointAboveGraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroHeightError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyChordError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PointOutsideSymmetralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidNError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HullError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deterministic pairwise tree sum; bit-stable regardless of thread count.
inline double tree_sum(std::vector<double> terms) {
  if (terms.empty()) return 0.0;
  while (terms.size() > 1) {
    std::size_t half = (terms.size() + 1) / 2;
    for (std::size_t i = 0; i + half < terms.size(); ++i) terms[i] += terms[i + half];
    terms.resize(half);
  }
  return terms[0];
}

inline bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

}  // namespace mlab
