#pragma once

// Kernel symmetry conditions gamma(z)k(xi,z) = -/+ gamma(xi)k(z,xi), the
// constructive search for gamma, the commutator equation for the
// identification operator, and the rank-two / counterexample constructions.

#include <optional>
#include <string>
#include <vector>

#include "hilbert.hpp"

namespace waveops {

enum class KernelSign {
  antisymmetric,  // gamma(z) k(xi,z) = -gamma(xi) k(z,xi)
  symmetric,      // gamma(z) k(xi,z) = +gamma(xi) k(z,xi)
};

const char* to_string(KernelSign sign);

struct Witness {
  enum class Kind { zero_pattern, diagonal, inconsistent_cycle };
  Kind kind;
  std::vector<std::size_t> indices;
};

const char* to_string(Witness::Kind kind);

struct SymmetryReport {
  KernelSign sign;
  double residual = 0.0;  // max |gamma_i k_ij +/- gamma_j k_ji| / max(1, max|k|)
  std::optional<GridFunction> gamma;
  std::optional<Witness> witness;
  double zero_tol = 0.0;
  double tol = 0.0;

  bool passed() const { return gamma.has_value() && residual <= tol; }
  std::string to_json() const;
};

// Residual of the condition for a given gamma; passes iff residual <= tol.
SymmetryReport check_kernel_condition(const Kernel& k, const GridFunction& gamma,
                                      KernelSign sign, double tol = 1e-10);

// Constructive search: ratio propagation over a spanning forest of the
// nonzero-pattern graph, roots pinned to gamma = 1, all non-forest edges
// verified. Returns gamma or a witness (zero-pattern asymmetry, nonzero
// diagonal in the antisymmetric case, or an inconsistent cycle).
SymmetryReport find_gamma(const Kernel& k, KernelSign sign,
                          double zero_tol = 1e-12, double tol = 1e-10);

struct IdentificationResult {
  Kernel x;            // kernel of X with X U - U X = K
  double cond;         // max|k| / min_{i != j} |lambda_i - lambda_j|
  bool ill_conditioned;  // cond above the flag threshold
};

// Solves X U - U X = K for the integral operator X: x(xi,z) = k(xi,z)/(xi-z)
// off the diagonal. Requires the kernel diagonal to vanish (relative
// tolerance diag_tol); flags cond > cond_flag.
IdentificationResult solve_identification(const Kernel& k,
                                          double diag_tol = 1e-10,
                                          double cond_flag = 1e8);

struct RankTwoCommutator {
  Kernel kernel;       // u1(xi)v1(z) - u2(xi)v2(z)
  GridFunction gamma;  // u1/v2
};

// Rank-two commutator kernel. Requires u1 v1 = u2 v2 pointwise and
// nonvanishing u1, v1, v2 so gamma = u1/v2 is admissible.
RankTwoCommutator make_rank_two(const GridFunction& u1, const GridFunction& v1,
                                const GridFunction& u2, const GridFunction& v2);

// k(xi, z) = 1 - Re(conj(xi) z) on the given measure.
Kernel counterexample_kernel(MeasurePtr mu);

struct CounterexampleSplit {
  RankTwoCommutator first;   // kernel (1 - conj(xi) z)/2, gamma = conj(z)/2
  RankTwoCommutator second;  // kernel (1 - xi conj(z))/2, gamma = z/2
};

// Splits 1 - Re(conj(xi) z) into two rank-two kernels, each passing the
// antisymmetric condition with its own distinct gamma.
CounterexampleSplit split_counterexample(MeasurePtr mu);

}  // namespace waveops
