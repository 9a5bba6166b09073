#pragma once

// Exact-ish circle arithmetic. Angles are stored in turns (fractions of a
// full revolution), so the point for theta is exp(2*pi*i*theta). Powers of
// circle points are computed by reducing n*theta mod 1 with an FMA
// two-product split; the reduced argument is accurate to ~1 ulp even when
// n*theta is far above the fractional resolution of a double. This is what
// keeps high-frequency Fourier sums and long operator orbits honest at the
// tolerances used by the verification suites.

#include <complex>
#include <cstdint>

namespace waveops {

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

// Fractional part of n*theta, reduced to [-0.5, 0.5].
// Valid while |n*theta| < 2^52 (always the case here: |theta| < 1).
double frac_mul(double theta, std::int64_t n);

// exp(2*pi*i*turns). Callers pass a reduced argument (|turns| <= 0.5).
std::complex<double> circle_exp(double turns);

// exp(2*pi*i*n*theta) with exact argument reduction.
std::complex<double> unit_power(double theta, std::int64_t n);

// Neumaier-compensated accumulation; used where sums are long enough that
// plain accumulation would eat into the verification tolerances.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
 public:
  void add(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace waveops
