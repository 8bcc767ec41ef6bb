#pragma once

#include "mlab/types.hpp"

#include <functional>

namespace mlab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Simpson on [a,b] with dyadic refinement and Richardson error
/// control. `tol` is an absolute tolerance for the whole interval.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            double tol = 1e-10, int max_depth = 48);

/// Composite Simpson over equally spaced samples (count must be odd >= 3).
double simpson_samples(const double* values, std::size_t count, double h);

}  // namespace mlab
