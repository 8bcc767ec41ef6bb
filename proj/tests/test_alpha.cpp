#include "mlab/alpha.hpp"

#include <doctest.h>

using namespace mlab;

TEST_CASE("alpha_mean closed cases") {
  // geometric, arithmetic, max
  CHECK(alpha_mean(AlphaParam::finite(0.0), 0.5, 0.5, 4.0, 9.0) == doctest::Approx(6.0));
  CHECK(alpha_mean(AlphaParam::finite(1.0), 0.5, 0.5, 4.0, 9.0) == doctest::Approx(6.5));
  CHECK(alpha_mean(AlphaParam::infinity(), 0.3, 0.7, 4.0, 9.0) == doctest::Approx(9.0));
}

TEST_CASE("alpha_mean is continuous at alpha = 0") {
  double at_zero = alpha_mean(AlphaParam::finite(0.0), 0.5, 0.5, 4.0, 9.0);
  double near_zero = alpha_mean(AlphaParam::finite(1e-6), 0.5, 0.5, 4.0, 9.0);
  CHECK(std::abs(near_zero - at_zero) < 1e-5);
}

TEST_CASE("alpha_mean input validation") {
  CHECK_THROWS_AS(alpha_mean(AlphaParam::finite(1.0), 0.5, 0.5, -1.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(alpha_mean(AlphaParam::finite(1.0), 0.5, 0.5, 0.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_mean(AlphaParam::finite(1.0), 0.6, 0.5, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(alpha_mean(AlphaParam::finite(1.0), 0.5 + 2e-12, 0.5, 1.0, 2.0),
                  std::invalid_argument);
}

TEST_CASE("alpha_mean monotone nondecreasing in alpha") {
  double prev = 0.0;
  bool first = true;
  for (double a : {-3.0, -1.0, -0.5, -1e-3, 0.0, 1e-3, 0.5, 1.0, 2.0, 5.0}) {
    double m = alpha_mean(AlphaParam::finite(a), 0.3, 0.7, 2.0, 5.0);
    if (!first) CHECK(m >= prev - 1e-12);
    prev = m;
    first = false;
  }
  CHECK(alpha_mean(AlphaParam::infinity(), 0.3, 0.7, 2.0, 5.0) >= prev);
}

TEST_CASE("AlphaParam rejects NaN and -inf") {
  CHECK_THROWS_AS(AlphaParam::finite(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(AlphaParam::finite(-kInf), std::invalid_argument);
  CHECK(AlphaParam::from_double(kInf).is_inf());
}

TEST_CASE("base transform round trip") {
  for (double a : {-1.0, -0.5, 0.0, 0.3, 1.0, 2.5}) {
    AlphaParam alpha = AlphaParam::finite(a);
    for (double y : {0.05, 0.4, 1.0, 1.7}) {
      double s = base_level_of_value(alpha, y);
      CHECK(value_of_base_level(alpha, s) == doctest::Approx(y).epsilon(1e-12));
    }
  }
}

TEST_CASE("transform limits match the log case for tiny alpha") {
  AlphaParam tiny = AlphaParam::finite(1e-9);
  AlphaParam zero = AlphaParam::finite(0.0);
  for (double s : {-2.0, 0.0, 0.7, 5.0}) {
    CHECK(value_of_base_level(tiny, s) ==
          doctest::Approx(value_of_base_level(zero, s)).epsilon(1e-6));
  }
}
