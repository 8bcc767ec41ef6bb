#pragma once

#include "mlab/types.hpp"

#include <cmath>

namespace mlab {

/// Concavity parameter alpha in R u {+inf}. The quasiconcave case -inf is
/// deliberately unsupported.
class AlphaParam {
 public:
  AlphaParam() : value_(0.0) {}

  static AlphaParam finite(double a) {
    if (std::isnan(a) || a == -kInf || a == kInf)
      throw std::invalid_argument("AlphaParam::finite: value must be a finite real");
    AlphaParam p;
    p.value_ = a;
    return p;
  }

  static AlphaParam infinity() {
    AlphaParam p;
    p.value_ = kInf;
    return p;
  }

  /// Parse from a double where +inf encodes the indicator case.
  static AlphaParam from_double(double a) {
    if (a == kInf) return infinity();
    return finite(a);
  }

  bool is_inf() const { return value_ == kInf; }
  bool is_zero() const { return value_ == 0.0; }
  double value() const { return value_; }

  friend bool operator==(const AlphaParam& a, const AlphaParam& b) { return a.value_ == b.value_; }

 private:
  double value_;
};

/// Weighted alpha-mean M_alpha^{(s,t)}(u,v): power mean for finite alpha != 0,
/// geometric mean at alpha = 0, max at alpha = +inf.
inline double alpha_mean(const AlphaParam& alpha, double s, double t, double u, double v) {
  if (!(u > 0.0) || !(v > 0.0)) throw std::invalid_argument("alpha_mean: u, v must be positive");
  if (s < 0.0 || t < 0.0 || std::abs(s + t - 1.0) > 1e-12)
    throw std::invalid_argument("alpha_mean: weights must be nonnegative and sum to 1");
  if (alpha.is_inf()) return std::max(u, v);
  double a = alpha.value();
  if (a == 0.0) return std::pow(u, s) * std::pow(v, t);
  return std::pow(s * std::pow(u, a) + t * std::pow(v, a), 1.0 / a);
}

// The alpha-exponential pair linking base values to function values:
//   value_of_base_level(alpha, s) = (1 - alpha*s)_+^{1/alpha}   (e^{-s} at alpha = 0)
//   base_level_of_value(alpha, y) = (1 - y^alpha)/alpha         (-log y at alpha = 0)
// Both are computed through log1p/expm1 so the alpha -> 0 limit is seamless.

inline double value_of_base_level(const AlphaParam& alpha, double s) {
  if (s == kInf) return 0.0;
  if (alpha.is_inf()) return s <= 0.0 ? 1.0 : 0.0;  // indicator of {base <= 0}
  double a = alpha.value();
  if (a == 0.0) return std::exp(-s);
  double w = -a * s;  // 1 - alpha*s = 1 + w
  if (1.0 + w <= 0.0) {
    if (a > 0.0) return 0.0;
    // alpha < 0 never reaches the pole on valid inputs; clamp defensively.
    return kInf;
  }
  return std::exp(std::log1p(w) / a);
}

inline double base_level_of_value(const AlphaParam& alpha, double y) {
  if (y <= 0.0) return kInf;
  if (alpha.is_inf()) return y >= 1.0 ? 0.0 : kInf;
  double a = alpha.value();
  if (a == 0.0) return -std::log(y);
  // (1 - y^a)/a = -expm1(a*log y)/a
  return -std::expm1(a * std::log(y)) / a;
}

}  // namespace mlab
