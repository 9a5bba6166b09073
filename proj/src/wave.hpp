#pragma once

// The propagated sequences U^n X U^-n, Cesaro means, the exact operator
// identities relating the difference/sum sequences to commutator pairings,
// the eta-sequence symmetries, and the Y-construction with its defect
// bounds.

#include <cstdint>
#include <span>
#include <vector>

#include "hilbert.hpp"
#include "phase.hpp"
#include "symmetry.hpp"

namespace waveops {

// U^n T U^-n for a diagonal unitary U; exact for negative n, O(m^2) for any
// |n|. U must either carry diagonal angle data (multiplication unitaries do)
// or be diagonal with unimodular entries.
OperatorMatrix propagate(const OperatorMatrix& U, const OperatorMatrix& T,
                         std::int64_t n);

// Running Cesaro accumulator: after k add() calls, mean() is the exact mean
// of the first k terms; evaluating all prefixes costs O(N) total.
class CesaroAccumulator {
 public:
  void add(Complex x) {
    sum_.add(x);
    ++count_;
  }
  std::int64_t count() const { return count_; }
  Complex mean() const {
    return count_ ? sum_.value() / static_cast<double>(count_) : Complex(0.0);
  }

 private:
  CompensatedComplexSum sum_;
  std::int64_t count_ = 0;
};

// mean of the first N terms of the sequence
Complex cesaro(std::span<const Complex> seq, std::size_t n_terms);

// ((U^n X U^-n - U^-n X U^n) h1, h2); zero at n = 0.
Complex difference_pairing(const OperatorMatrix& X, const OperatorMatrix& U,
                           const GridFunction& h1, const GridFunction& h2,
                           std::int64_t n);
// ((U^n X U^-n + U^-n X U^n) h1, h2)
Complex sum_pairing(const OperatorMatrix& X, const OperatorMatrix& U,
                    const GridFunction& h1, const GridFunction& h2,
                    std::int64_t n);

// eta_m = (K U^{k-m-1} e, U^{l-m} ebar)
Complex eta(const OperatorMatrix& K, const OperatorMatrix& U,
            const GridFunction& e, const GridFunction& ebar, std::int64_t k,
            std::int64_t l, std::int64_t m);

// A materialized block of eta values with prefix sums; formal_sum honors the
// convention sum_{m=p}^{q} = -sum_{m=q+1}^{p-1} for p > q (empty at p = q+1).
class EtaSequence {
 public:
  EtaSequence(const OperatorMatrix& K, const OperatorMatrix& U,
              const GridFunction& e, const GridFunction& ebar, std::int64_t k,
              std::int64_t l, std::int64_t m_lo, std::int64_t m_hi);

  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  std::int64_t k() const { return k_; }
  std::int64_t l() const { return l_; }
  Complex at(std::int64_t m) const;
  Complex formal_sum(std::int64_t p, std::int64_t q) const;
  double max_abs() const;

 private:
  Complex range_sum(std::int64_t p, std::int64_t q) const;  // requires p <= q

  std::int64_t lo_, hi_, k_, l_;
  std::vector<Complex> values_;
  std::vector<Complex> prefix_;  // prefix_[t] = sum of values_[0..t-1]
};

EtaSequence eta_range(const OperatorMatrix& K, const OperatorMatrix& U,
                      const GridFunction& e, const GridFunction& ebar,
                      std::int64_t k, std::int64_t l, std::int64_t m_lo,
                      std::int64_t m_hi);

// max-entry residual of
//   U^p X U^-p - U^q X U^-q = sum_{m=p}^{q-1} U^m K U^{-m-1},  K = XU - UX,
// with the formal-sum convention.
double verify_telescoping(const OperatorMatrix& X, const OperatorMatrix& U,
                          std::int64_t p, std::int64_t q);

// |LHS - RHS| of the difference identity (requires C K* C = -K):
//   ((U^n X U^-n - U^-n X U^n) U^k e, U^l ebar)
//     = sum_{m=1}^{k+l} (U^n K U^-n U^{k-m} e, U^{l-m+1} ebar)
// gamma must be unimodular; ebar = C_gamma e. Throws (reporting the measured
// defect) if the precondition fails.
double verify_lemma_difference(const OperatorMatrix& X, const OperatorMatrix& U,
                               const GridFunction& gamma, const GridFunction& e,
                               std::int64_t k, std::int64_t l, std::int64_t n);

// |LHS - RHS| of the sum identity (requires C K* C = +K):
//   ((U^n X U^-n + U^-n X U^n) U^k e, U^l ebar)
//     = ((X + U^{k+l} X U^{-(k+l)}) U^k e, U^l ebar)
//       + sum_{m=1}^{k+l} (U^n K U^-n U^{k-m} e, U^{l-m+1} ebar)
double verify_lemma_sum(const OperatorMatrix& X, const OperatorMatrix& U,
                        const GridFunction& gamma, const GridFunction& e,
                        std::int64_t k, std::int64_t l, std::int64_t n);

struct YConstruction {
  OperatorMatrix y;
  double commutator_defect;  // ||Y U - U Y - K||_F, bounded by 4||X||/N
  double symmetry_defect;    // ||C Y* C - Y||_F, ~0 whenever C K* C = -K
  double x_norm;             // operator norm of X (bound scale)
};

// Y = Cesaro mean over n = 0..N-1 of Y_n = X - (U^n X U^-n + U^-n X U^n)/2.
YConstruction construct_Y(const OperatorMatrix& X, const OperatorMatrix& U,
                          const GridFunction& gamma, std::int64_t n_terms);

// ||C K* C + K||_F for K = XU - UX, given C X* C = X on input (checked to
// input_tol, throws otherwise).
double check_proposition_forward(const OperatorMatrix& X,
                                 const OperatorMatrix& U,
                                 const GridFunction& gamma,
                                 double input_tol = 1e-12);

// ---- batched identity grid ------------------------------------------------
// Worst-case residuals of the lemma identities and the eta symmetries over a
// (k, l, n) grid, sharing propagations and pairing tables across the grid.
// Used by the verification suite; cross-validated against the per-call ops.

struct IdentityGridSummary {
  double max_lemma_residual = 0.0;   // worst |LHS - RHS|
  double lemma_scale = 0.0;          // ||X||_op * ||e||^2
  double max_eta_pair_defect = 0.0;  // eta_m -/+ eta_{k+l-1-m}, relative
  double max_eta_window_defect = 0.0;  // |sum_{m=-n}^{n+k+l-1} eta_m|, relative
                                       // (difference case only)
  double precondition_defect = 0.0;  // ||C K* C +/- K||_F
  std::int64_t worst_k = 0, worst_l = 0, worst_n = 0;
};

IdentityGridSummary identity_grid(const OperatorMatrix& X,
                                  const OperatorMatrix& U,
                                  const GridFunction& gamma,
                                  const GridFunction& e, KernelSign sign,
                                  std::int64_t k_min, std::int64_t k_max,
                                  std::int64_t l_min, std::int64_t l_max,
                                  std::span<const std::int64_t> n_values);

}  // namespace waveops
