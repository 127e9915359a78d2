#include "hta/expint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hta {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k * k!), x <= 1.
double e1_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 60; ++k) {
    term *= -x / k;
    const double contrib = -term / k;
    sum += contrib;
    if (std::fabs(contrib) < 1e-18 * (std::fabs(sum) + 1e-300)) break;
  }
  return -kEulerGamma - std::log(x) + sum;
}

// Modified Lentz evaluation of the continued fraction
//   e^x E1(x) = 1/(x+1-) 1^2/(x+3-) 2^2/(x+5-) ...
double e1_cf_scaled(double x) {
  const double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k <= 200; ++k) {
    const double a = -static_cast<double>(k) * k;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double delta = c * d;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace

double expint_e1(double x) {
  if (!(x > 0.0)) throw std::domain_error("expint_e1: argument must be positive");
  if (x <= 1.0) return e1_series(x);
  const double scaled = e1_cf_scaled(x);
  if (x > 700.0) return 0.0;  // below double underflow once e^-x is applied
  return std::exp(-x) * scaled;
}

double expint_e1_scaled(double x) {
  if (!(x > 0.0)) throw std::domain_error("expint_e1_scaled: argument must be positive");
  if (x <= 1.0) return std::exp(x) * e1_series(x);
  return e1_cf_scaled(x);
}

}  // namespace hta
