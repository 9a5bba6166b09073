#pragma once

// Seeded random helpers with pinned output. std::mt19937_64 is bit-exact
// across platforms; the value transforms below are written out explicitly so
// generated measures/kernels never depend on libstdc++ distribution details.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "phase.hpp"

namespace waveops {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal (Box-Muller)
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  // standard complex normal (unit variance per component)
  std::complex<double> complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  // uniform on the closed unit disk
  std::complex<double> unit_disk() {
    const double r = std::sqrt(uniform());
    return r * circle_exp(uniform() - 0.5);
  }

  // uniform on the unit circle
  std::complex<double> unit_circle() { return circle_exp(uniform() - 0.5); }

  std::uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace waveops
