#pragma once

#include "mlab/types.hpp"

#include <cstdint>
#include <random>

namespace mlab {

/// Seeded RNG wrapper; all randomized code in the library draws through this
/// so runs are reproducible from a single integer seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed ^ 0x9e3779b97f4a7c15ull) {}

  double uniform(double lo, double hi) {
    // Fixed-width mantissa draw; independent of library distribution quirks.
    std::uint64_t bits = gen_() >> 11;  // 53 random bits
    double u = static_cast<double>(bits) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Uniform direction on S^{n-1}; in 1D this is +-1.
  Vec unit_vector(int n) {
    if (n == 1) return vec1(uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    double theta = uniform(0.0, 2.0 * M_PI);
    return vec2(std::cos(theta), std::sin(theta));
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mlab
