#pragma once

// L^2(mu) over an atomic measure: grid functions, the multiplication
// unitary, integral operators with kernels, adjoints, Hilbert-Schmidt norms
// and the conjugations C_gamma f = conj(gamma) conj(f).
//
// Operators are stored in orthonormalized coordinates: the unitary map
// f |-> (f_j sqrt(w_j)) identifies L^2(mu) with standard C^m, so adjoint =
// conjugate transpose and HS norm = Frobenius norm. Function-coordinate
// views are conversions at the boundary.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "measure.hpp"

namespace waveops {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

class GridFunction {
 public:
  GridFunction(MeasurePtr mu, Vector values);

  static GridFunction constant(MeasurePtr mu, Complex value);
  // z^power on the atoms
  static GridFunction monomial(MeasurePtr mu, std::int64_t power);
  static GridFunction from_values(MeasurePtr mu, std::vector<Complex> values);

  const MeasurePtr& measure() const { return mu_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const Vector& values() const { return values_; }
  Complex operator[](std::size_t j) const {
    return values_[static_cast<Eigen::Index>(j)];
  }

  // coordinates f_j sqrt(w_j)
  Vector ortho() const;
  double norm() const;
  bool nonvanishing(double floor = 0.0) const;
  bool unimodular(double tol = 1e-12) const;

  GridFunction pointwise_product(const GridFunction& other) const;
  GridFunction pointwise_quotient(const GridFunction& other) const;
  GridFunction conj() const;

 private:
  MeasurePtr mu_;
  Vector values_;  // function coordinates
};

// (f, g) = sum_j f_j conj(g_j) w_j
Complex inner(const GridFunction& f, const GridFunction& g);

class OperatorMatrix {
 public:
  OperatorMatrix(MeasurePtr mu, Matrix entries, std::string tag = {});

  const MeasurePtr& measure() const { return mu_; }
  const Matrix& entries() const { return mat_; }
  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  const std::string& tag() const { return tag_; }

  GridFunction apply(const GridFunction& f) const;

  OperatorMatrix adjoint() const;
  double frobenius_norm() const { return mat_.norm(); }
  double max_abs_entry() const;
  // largest singular value via power iteration on M*M (deterministic start)
  double operator_norm() const;

  bool is_diagonal(double tol = 1e-12) const;
  // set when the operator was built as a multiplication unitary; angles in
  // turns, enabling exact high powers
  const std::optional<std::vector<double>>& diagonal_turns() const {
    return diag_turns_;
  }
  void set_diagonal_turns(std::vector<double> turns);

  OperatorMatrix& operator+=(const OperatorMatrix& other);
  OperatorMatrix& operator-=(const OperatorMatrix& other);
  OperatorMatrix& operator*=(Complex scale);

 private:
  MeasurePtr mu_;
  Matrix mat_;  // orthonormalized coordinates
  std::string tag_;
  std::optional<std::vector<double>> diag_turns_;
};

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(Complex scale, OperatorMatrix a);

// multiplication by z: diag(exp(2 pi i theta_j))
OperatorMatrix multiplication_unitary(MeasurePtr mu);
// multiplication by a bounded function phi: diag(phi_j)
OperatorMatrix multiplication_by(const GridFunction& phi);

// Kernel values k(xi, z) on atom pairs; row index = z (output variable),
// column index = xi (integration variable): entry(i, j) = k(x_j, x_i).
class Kernel {
 public:
  Kernel(MeasurePtr mu, Matrix values);

  template <typename F>
  static Kernel from_function(MeasurePtr mu, F&& k) {
    const auto m = static_cast<Eigen::Index>(mu->size());
    Matrix vals(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        vals(i, j) = k(mu->point(static_cast<std::size_t>(j)),
                       mu->point(static_cast<std::size_t>(i)));
      }
    }
    return Kernel(std::move(mu), std::move(vals));
  }

  const MeasurePtr& measure() const { return mu_; }
  const Matrix& values() const { return mat_; }
  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  Complex operator()(std::size_t i, std::size_t j) const {
    return mat_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double max_abs() const;

  // entrywise transpose: (xi, z) -> k(z, xi)
  Kernel transpose() const;

  void save(std::ostream& out) const;
  static Kernel load(MeasurePtr mu, std::istream& in);
  static Kernel load_file(MeasurePtr mu, const std::string& path);
  void save_file(const std::string& path) const;

 private:
  MeasurePtr mu_;
  Matrix mat_;
};

// (Kf)(z_i) = sum_j k(x_j, z_i) f_j w_j
OperatorMatrix integral_operator(const Kernel& k);
// inverse of integral_operator (every operator on L^2(mu) is integral here)
Kernel kernel_of(const OperatorMatrix& T);
// sqrt(sum_{i,j} |k_ij|^2 w_i w_j) = Frobenius norm of integral_operator(k)
double hs_norm(const Kernel& k);

// Anti-linear conjugation C_gamma f = conj(gamma) * conj(f); gamma must be
// nonvanishing; unimodular gamma makes it involutive.
class Conjugation {
 public:
  Conjugation(MeasurePtr mu, GridFunction gamma);
  // canonical C f = conj(f)
  static Conjugation canonical(MeasurePtr mu);

  const MeasurePtr& measure() const { return mu_; }
  const GridFunction& gamma() const { return gamma_; }
  bool unimodular() const { return unimodular_; }

 private:
  MeasurePtr mu_;
  GridFunction gamma_;
  bool unimodular_;
};

GridFunction conjugate(const Conjugation& c, const GridFunction& f);

// h |-> C(T*(Ch)); requires unimodular gamma (so C is involutive).
// In matrix form: entries(i,j) -> conj(gamma_i) * entries(j,i) * gamma_j.
OperatorMatrix c_transform(const Conjugation& c, const OperatorMatrix& T);

// Frobenius norm of C T* C -/+ T (sign +1: defect of C-symmetry CT*C = T;
// sign -1: defect of C-antisymmetry CT*C = -T).
double c_symmetry_defect(const Conjugation& c, const OperatorMatrix& T,
                         int sign);

}  // namespace waveops
