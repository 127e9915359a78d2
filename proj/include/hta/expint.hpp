#pragma once

namespace hta {

// Exponential integral E1(x) = \int_x^inf e^-t / t dt, x > 0.
// Power series below x = 1, modified-Lentz continued fraction above.
double expint_e1(double x);

// e^x * E1(x) without forming e^x; stays finite for arbitrarily large x
// (tends to 1/x - 1/x^2 + ...). Needed where E1 underflows but the
// exponentially scaled product is the quantity of interest.
double expint_e1_scaled(double x);

}  // namespace hta
