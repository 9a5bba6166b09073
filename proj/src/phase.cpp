#include "phase.hpp"

#include <cmath>

namespace waveops {

double frac_mul(double theta, std::int64_t n) {
  const double dn = static_cast<double>(n);
  const double p = dn * theta;
  // p + err == dn*theta exactly; both terms below are exact operations.
  const double err = std::fma(dn, theta, -p);
  double f = (p - std::nearbyint(p)) + err;
  if (f > 0.5) {
    f -= 1.0;
  } else if (f < -0.5) {
    f += 1.0;
  }
  return f;
}

std::complex<double> circle_exp(double turns) {
  const double a = kTwoPi * turns;
  return {std::cos(a), std::sin(a)};
}

std::complex<double> unit_power(double theta, std::int64_t n) {
  return circle_exp(frac_mul(theta, n));
}

}  // namespace waveops
