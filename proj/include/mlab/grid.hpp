#pragma once

#include "mlab/geometry.hpp"
#include "mlab/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mlab {

/// Nonnegative function samples on a regular axis-aligned box grid. This is
/// the universal fallback carrier for symmetrized functions. Samples store
/// the function values themselves (not base values).
class GridFunction {
 public:
  GridFunction(Box box, std::vector<std::int64_t> resolution, std::vector<double> values,
               double tail_mass_bound = 0.0);

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  const std::vector<std::int64_t>& resolution() const { return res_; }
  const std::vector<double>& values() const { return values_; }
  double tail_mass_bound() const { return tail_; }

  double step(int axis) const { return step_[axis]; }
  double node_coord(int axis, std::int64_t i) const { return box_.lo[axis] + step_[axis] * i; }
  double at(std::int64_t i) const { return values_[i]; }
  double at(std::int64_t i, std::int64_t j) const { return values_[i * res_[1] + j]; }

  /// Catmull-Rom interpolation (clamped to >= 0); 0 outside the box.
  double eval(const Vec& x) const;

  double max_value() const;

  /// Simpson mass with a Richardson a-posteriori error bound (+ declared tail).
  std::pair<double, double> mass_with_bound() const;

  void save_binary(const std::string& path) const;
  static GridFunction load_binary(const std::string& path);
  std::string to_json() const;
  static GridFunction from_json(const std::string& text);

 private:
  Box box_;
  std::vector<std::int64_t> res_;
  std::vector<double> values_;
  std::vector<double> step_;
  double tail_ = 0.0;
};

using GridPtr = std::shared_ptr<const GridFunction>;

}  // namespace mlab
