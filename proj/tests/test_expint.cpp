#include <doctest.h>

#include <cmath>

#include "hta/expint.hpp"
#include "support.hpp"

using hta::expint_e1;
using hta::expint_e1_scaled;

TEST_CASE("E1 matches the tabulated value at x = 1") {
  // Abramowitz & Stegun 5.1 table entry.
  CHECK(expint_e1(1.0) == doctest::Approx(0.219383934395520274).epsilon(1e-13));
}

TEST_CASE("E1 agrees with direct quadrature across the series/fraction split") {
  for (double x : {0.05, 0.3, 0.9, 1.0, 1.1, 3.0, 8.0, 25.0}) {
    // \int_x^B e^-t/t dt; the dropped tail is below e^-B and invisible at
    // the checked tolerance.
    const double upper = x + 60.0;
    const double quad =
        testsup::integrate([](double t) { return std::exp(-t) / t; }, x, upper, 1e-13);
    CHECK(expint_e1(x) == doctest::Approx(quad).epsilon(1e-10));
  }
}

TEST_CASE("scaled form equals e^x E1(x) where both are representable") {
  for (double x : {0.1, 0.5, 1.0, 2.0, 10.0, 100.0})
    CHECK(expint_e1_scaled(x) == doctest::Approx(std::exp(x) * expint_e1(x)).epsilon(1e-12));
}

TEST_CASE("scaled form follows the asymptotic series for large arguments") {
  for (double x : {1e4, 1e6, 1e9}) {
    const double asymptotic = 1.0 / x - 1.0 / (x * x) + 2.0 / (x * x * x);
    CHECK(expint_e1_scaled(x) == doctest::Approx(asymptotic).epsilon(1e-10));
  }
}

TEST_CASE("series region keeps the log singularity accurate") {
  // E1(x) + ln x + gamma -> 0 as x -> 0, linearly in x.
  const double x = 1e-12;
  const double res = expint_e1(x) + std::log(x) + 0.57721566490153286;
  CHECK(std::fabs(res) < 1e-11);
}

TEST_CASE("nonpositive arguments are rejected") {
  CHECK_THROWS_AS(expint_e1(0.0), std::domain_error);
  CHECK_THROWS_AS(expint_e1(-1.0), std::domain_error);
  CHECK_THROWS_AS(expint_e1_scaled(0.0), std::domain_error);
}
