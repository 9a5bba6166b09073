#pragma once

// Atomic discretizations of Borel measures on the unit circle, plus their
// Fourier-analytic diagnostics (coefficients, Wiener averages, decay
// profiles). Everything is immutable after construction.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace waveops {

struct Atom {
  double theta;   // position in turns, in [0, 1)
  double weight;  // > 0
};

class DiscreteMeasure;
using MeasurePtr = std::shared_ptr<const DiscreteMeasure>;

class DiscreteMeasure {
 public:
  // Atoms must have thetas in [0,1), strictly increasing after sorting
  // (duplicates rejected) and positive weights. With normalize set, weights
  // are rescaled to total mass 1.
  DiscreteMeasure(std::vector<Atom> atoms, std::string label,
                  bool normalize = true);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double theta(std::size_t j) const { return atoms_[j].theta; }
  double weight(std::size_t j) const { return atoms_[j].weight; }
  double sqrt_weight(std::size_t j) const { return sqrt_weights_[j]; }
  // the circle point exp(2*pi*i*theta_j)
  std::complex<double> point(std::size_t j) const { return points_[j]; }

  double total_mass() const { return total_mass_; }
  const std::string& label() const { return label_; }

  // smallest cyclic gap between adjacent atoms, in turns (1 for a single atom)
  double min_gap() const { return min_gap_; }
  // min over i != j of |1 - exp(2*pi*i*(theta_i - theta_j))| = 2 sin(pi*min_gap)
  double min_gap_phase() const { return min_gap_phase_; }
  // iteration horizon up to which the atomic model mimics a continuous
  // measure's averaging behaviour: ceil(10 / min_gap_phase)
  std::int64_t effective_horizon() const { return horizon_; }

  void save(std::ostream& out) const;
  std::string serialized() const;
  // FNV-1a 64 fingerprint of the serialized table (hex)
  std::string fingerprint() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> sqrt_weights_;
  std::vector<std::complex<double>> points_;
  std::string label_;
  double total_mass_ = 0.0;
  double min_gap_ = 0.0;
  double min_gap_phase_ = 0.0;
  std::int64_t horizon_ = 0;
};

// m atoms at j/m, weight 1/m each (Lebesgue stand-in).
MeasurePtr make_uniform(std::size_t m);

// 2^L atoms at sum_k eps_k * 2/3^k over eps in {0,1}^L, weight 2^-L each.
// The step values are snapped to the 2^-53 grid so every subset sum is an
// exact double; level 1..20.
MeasurePtr make_cantor(int level);

// Finite Riesz product on a grid: atoms at j/m with weights proportional to
// prod_q (1 + a_q cos(2 pi n_q theta)). Requires |a_q| < 1, strictly
// lacunary freqs (n_{q+1} >= 3 n_q) and m > 2 max(freqs).
MeasurePtr make_riesz(const std::vector<double>& coeffs,
                      const std::vector<std::int64_t>& freqs, std::size_t grid,
                      bool normalize = true);

MeasurePtr make_from_atoms(std::vector<Atom> atoms, std::string label,
                           bool normalize = true);

// sorted random atoms on a jittered lattice (guarantees min_gap >= 0.2/m),
// random weights normalized to mass 1
MeasurePtr make_random(std::size_t m, std::uint64_t seed);

MeasurePtr load_measure(std::istream& in);
MeasurePtr load_measure_file(const std::string& path);
void save_measure_file(const DiscreteMeasure& mu, const std::string& path);

// mu_hat(n) = sum_j w_j f_j exp(-2 pi i n theta_j); f == 1 when absent.
std::complex<double> fourier_coefficient(const DiscreteMeasure& mu,
                                         std::int64_t n);
std::complex<double> fourier_coefficient(
    const DiscreteMeasure& mu, std::int64_t n,
    std::span<const std::complex<double>> values);

// (1/N) sum_{n=1..N} |mu_hat(n)|^2; tends to sum_j w_j^2.
double wiener_average(const DiscreteMeasure& mu, std::int64_t n_terms);

struct FourierProfile {
  std::vector<std::complex<double>> values;  // mu_hat(n), n = 0..n_max
  std::vector<double> cesaro_abs;  // cesaro_abs[i] = mean of |values[0..i]|
};

FourierProfile decay_profile(const DiscreteMeasure& mu, std::int64_t n_max);

// CSV with columns n,re,im,abs,cesaro_abs; with_wiener appends a wiener
// column (1/n) sum_{k=1..n} |mu_hat(k)|^2.
void write_profile_csv(std::ostream& out, const FourierProfile& profile,
                       bool with_wiener = false);

std::uint64_t fnv1a64(std::span<const char> bytes);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace waveops
