#include <doctest.h>

#include <cmath>
#include <complex>

#include "phase.hpp"
#include "rng.hpp"

using namespace waveops;

TEST_SUITE_BEGIN("phase");

TEST_CASE("frac_mul matches exact rational arithmetic at high frequencies") {
  // theta = a/3^L is near-representable; n*theta mod 1 computed in integers
  // is the reference
  const int level = 12;
  std::int64_t pow3 = 1;
  for (int k = 0; k < level; ++k) pow3 *= 3;
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t a = static_cast<std::int64_t>(rng.bits() % pow3);
    const double theta = static_cast<double>(a) / static_cast<double>(pow3);
    const std::int64_t n =
        static_cast<std::int64_t>(rng.bits() % 2000000) - 1000000;
    // reference: ((n*a mod 3^L) / 3^L) reduced to [-1/2, 1/2]; theta's own
    // rounding contributes at most |n|*ulp(1) ~ 1e-10 here
    std::int64_t rem = (n % pow3) * a % pow3;
    if (rem < 0) rem += pow3;
    double ref = static_cast<double>(rem) / static_cast<double>(pow3);
    if (ref > 0.5) ref -= 1.0;
    const double got = frac_mul(theta, n);
    // both are the fractional part of n*theta up to n*ulp(theta) <= 1e-9;
    // frac_mul's own error must be ~1 ulp of the exact product
    const double wrap = std::abs(got - ref) > 0.5
                            ? std::abs(std::abs(got - ref) - 1.0)
                            : std::abs(got - ref);
    CHECK(wrap < 1e-9);
  }
}

TEST_CASE("frac_mul is exactly odd in n") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const double theta = rng.uniform();
    const std::int64_t n = static_cast<std::int64_t>(rng.bits() % 1000000);
    CHECK(frac_mul(theta, -n) == -frac_mul(theta, n));
  }
}

TEST_CASE("unit_power stays on the circle and conjugates exactly") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const double theta = rng.uniform();
    const std::int64_t n = static_cast<std::int64_t>(rng.bits() % 100000);
    const std::complex<double> z = unit_power(theta, n);
    CHECK(std::abs(std::abs(z) - 1.0) < 1e-15);
    CHECK(unit_power(theta, -n) == std::conj(z));
  }
  CHECK(unit_power(0.73, 0) == std::complex<double>(1.0, 0.0));
}

TEST_CASE("compensated sum beats plain summation on adversarial input") {
  CompensatedSum sum;
  sum.add(1.0);
  for (int i = 0; i < 10; ++i) sum.add(1e-17);
  sum.add(-1.0);
  CHECK(sum.value() == doctest::Approx(1e-16).epsilon(1e-3));
}

TEST_SUITE_END();
