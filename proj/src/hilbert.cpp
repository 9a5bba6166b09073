#include "hilbert.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "phase.hpp"

namespace waveops {

namespace {

void require_same_measure(const MeasurePtr& a, const MeasurePtr& b,
                          const char* what) {
  if (a.get() != b.get()) {
    throw std::invalid_argument(std::string(what) +
                                ": operands live on different measures");
  }
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

GridFunction::GridFunction(MeasurePtr mu, Vector values)
    : mu_(std::move(mu)), values_(std::move(values)) {
  if (!mu_) throw std::invalid_argument("grid function: null measure");
  if (static_cast<std::size_t>(values_.size()) != mu_->size()) {
    throw std::invalid_argument(
        "grid function: value count does not match the measure");
  }
}

GridFunction GridFunction::constant(MeasurePtr mu, Complex value) {
  const auto m = static_cast<Eigen::Index>(mu->size());
  return GridFunction(std::move(mu), Vector::Constant(m, value));
}

GridFunction GridFunction::monomial(MeasurePtr mu, std::int64_t power) {
  const auto m = static_cast<Eigen::Index>(mu->size());
  Vector v(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    v[j] = unit_power(mu->theta(static_cast<std::size_t>(j)), power);
  }
  return GridFunction(std::move(mu), std::move(v));
}

GridFunction GridFunction::from_values(MeasurePtr mu,
                                       std::vector<Complex> values) {
  Vector v = Eigen::Map<const Vector>(values.data(),
                                      static_cast<Eigen::Index>(values.size()));
  return GridFunction(std::move(mu), std::move(v));
}

Vector GridFunction::ortho() const {
  Vector v(values_.size());
  for (Eigen::Index j = 0; j < values_.size(); ++j) {
    v[j] = values_[j] * mu_->sqrt_weight(static_cast<std::size_t>(j));
  }
  return v;
}

double GridFunction::norm() const {
  CompensatedSum s;
  for (Eigen::Index j = 0; j < values_.size(); ++j) {
    s.add(std::norm(values_[j]) * mu_->weight(static_cast<std::size_t>(j)));
  }
  return std::sqrt(s.value());
}

bool GridFunction::nonvanishing(double floor) const {
  for (Eigen::Index j = 0; j < values_.size(); ++j) {
    if (!(std::abs(values_[j]) > floor)) return false;
  }
  return true;
}

bool GridFunction::unimodular(double tol) const {
  for (Eigen::Index j = 0; j < values_.size(); ++j) {
    if (std::abs(std::abs(values_[j]) - 1.0) > tol) return false;
  }
  return true;
}

GridFunction GridFunction::pointwise_product(const GridFunction& other) const {
  require_same_measure(mu_, other.mu_, "pointwise product");
  return GridFunction(mu_, values_.cwiseProduct(other.values_));
}

GridFunction GridFunction::pointwise_quotient(const GridFunction& other) const {
  require_same_measure(mu_, other.mu_, "pointwise quotient");
  if (!other.nonvanishing()) {
    throw std::invalid_argument("pointwise quotient: vanishing denominator");
  }
  return GridFunction(mu_, values_.cwiseQuotient(other.values_));
}

GridFunction GridFunction::conj() const {
  return GridFunction(mu_, values_.conjugate());
}

Complex inner(const GridFunction& f, const GridFunction& g) {
  require_same_measure(f.measure(), g.measure(), "inner");
  CompensatedComplexSum s;
  for (std::size_t j = 0; j < f.size(); ++j) {
    s.add(f[j] * std::conj(g[j]) * f.measure()->weight(j));
  }
  return s.value();
}

OperatorMatrix::OperatorMatrix(MeasurePtr mu, Matrix entries, std::string tag)
    : mu_(std::move(mu)), mat_(std::move(entries)), tag_(std::move(tag)) {
  if (!mu_) throw std::invalid_argument("operator: null measure");
  if (mat_.rows() != mat_.cols() ||
      static_cast<std::size_t>(mat_.rows()) != mu_->size()) {
    throw std::invalid_argument("operator: shape does not match the measure");
  }
}

GridFunction OperatorMatrix::apply(const GridFunction& f) const {
  require_same_measure(mu_, f.measure(), "operator apply");
  Vector out = mat_ * f.ortho();
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    out[j] /= mu_->sqrt_weight(static_cast<std::size_t>(j));
  }
  return GridFunction(mu_, std::move(out));
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(mu_, mat_.adjoint(), tag_.empty() ? "" : tag_ + "*");
}

double OperatorMatrix::max_abs_entry() const {
  return mat_.cwiseAbs().maxCoeff();
}

double OperatorMatrix::operator_norm() const {
  const Eigen::Index m = mat_.rows();
  if (m == 0) return 0.0;
  // generic deterministic start vector (golden-ratio phases)
  Vector v(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    v[j] = circle_exp(frac_mul(0.38196601125010515, j)) *
           (1.0 + static_cast<double>(j) / static_cast<double>(m));
  }
  v.normalize();
  double sigma = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    Vector w = mat_ * v;
    const double s = w.norm();
    if (s == 0.0) return 0.0;
    Vector u = mat_.adjoint() * w;
    const double un = u.norm();
    if (un == 0.0) return s;
    v = u / un;
    if (std::abs(s - sigma) <= 1e-13 * s && iter > 4) {
      sigma = s;
      break;
    }
    sigma = s;
  }
  return sigma;
}

bool OperatorMatrix::is_diagonal(double tol) const {
  const double scale = std::max(1.0, max_abs_entry());
  for (Eigen::Index i = 0; i < mat_.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat_.cols(); ++j) {
      if (i != j && std::abs(mat_(i, j)) > tol * scale) return false;
    }
  }
  return true;
}

void OperatorMatrix::set_diagonal_turns(std::vector<double> turns) {
  if (turns.size() != mu_->size()) {
    throw std::invalid_argument("diagonal turns: wrong length");
  }
  diag_turns_ = std::move(turns);
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& other) {
  require_same_measure(mu_, other.mu_, "operator sum");
  mat_ += other.mat_;
  diag_turns_.reset();
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& other) {
  require_same_measure(mu_, other.mu_, "operator difference");
  mat_ -= other.mat_;
  diag_turns_.reset();
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(Complex scale) {
  mat_ *= scale;
  diag_turns_.reset();
  return *this;
}

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) {
  a += b;
  return a;
}

OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) {
  a -= b;
  return a;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_measure(a.measure(), b.measure(), "operator product");
  return OperatorMatrix(a.measure(), a.entries() * b.entries());
}

OperatorMatrix operator*(Complex scale, OperatorMatrix a) {
  a *= scale;
  return a;
}

OperatorMatrix multiplication_unitary(MeasurePtr mu) {
  const auto m = static_cast<Eigen::Index>(mu->size());
  Matrix d = Matrix::Zero(m, m);
  std::vector<double> turns;
  turns.reserve(mu->size());
  for (Eigen::Index j = 0; j < m; ++j) {
    d(j, j) = mu->point(static_cast<std::size_t>(j));
    turns.push_back(mu->theta(static_cast<std::size_t>(j)));
  }
  OperatorMatrix u(std::move(mu), std::move(d), "U");
  u.set_diagonal_turns(std::move(turns));
  return u;
}

OperatorMatrix multiplication_by(const GridFunction& phi) {
  const auto m = static_cast<Eigen::Index>(phi.size());
  Matrix d = Matrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    d(j, j) = phi[static_cast<std::size_t>(j)];
  }
  return OperatorMatrix(phi.measure(), std::move(d), "mult");
}

Kernel::Kernel(MeasurePtr mu, Matrix values)
    : mu_(std::move(mu)), mat_(std::move(values)) {
  if (!mu_) throw std::invalid_argument("kernel: null measure");
  if (mat_.rows() != mat_.cols() ||
      static_cast<std::size_t>(mat_.rows()) != mu_->size()) {
    throw std::invalid_argument("kernel: shape does not match the measure");
  }
}

double Kernel::max_abs() const { return mat_.cwiseAbs().maxCoeff(); }

Kernel Kernel::transpose() const {
  return Kernel(mu_, mat_.transpose());
}

void Kernel::save(std::ostream& out) const {
  out << "# waveops-kernel v1 measure=" << mu_->fingerprint()
      << " dim=" << dim() << "\n";
  out << "i,j,re,im\n";
  for (Eigen::Index i = 0; i < mat_.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat_.cols(); ++j) {
      out << i << "," << j << "," << format_g17(mat_(i, j).real()) << ","
          << format_g17(mat_(i, j).imag()) << "\n";
    }
  }
}

Kernel Kernel::load(MeasurePtr mu, std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("kernel load: empty stream");
  }
  const std::string magic = "# waveops-kernel v1 measure=";
  if (header.rfind(magic, 0) != 0) {
    throw std::runtime_error("kernel load: bad header");
  }
  std::istringstream hs(header.substr(magic.size()));
  std::string hash;
  hs >> hash;
  if (hash != mu->fingerprint()) {
    throw std::runtime_error(
        "kernel load: kernel was written against a different measure "
        "(fingerprint mismatch)");
  }
  std::string line;
  std::getline(in, line);  // column header
  const auto m = static_cast<Eigen::Index>(mu->size());
  Matrix vals = Matrix::Zero(m, m);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Eigen::Index i = 0, j = 0;
    double re = 0, im = 0;
    if (std::sscanf(line.c_str(), "%ld,%ld,%lf,%lf", &i, &j, &re, &im) != 4) {
      throw std::runtime_error("kernel load: bad row: " + line);
    }
    if (i < 0 || i >= m || j < 0 || j >= m) {
      throw std::runtime_error("kernel load: index out of range");
    }
    vals(i, j) = Complex(re, im);
  }
  return Kernel(std::move(mu), std::move(vals));
}

Kernel Kernel::load_file(MeasurePtr mu, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open kernel file: " + path);
  return load(std::move(mu), in);
}

void Kernel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write kernel file: " + path);
  save(out);
}

OperatorMatrix integral_operator(const Kernel& k) {
  const auto& mu = *k.measure();
  const auto m = static_cast<Eigen::Index>(mu.size());
  Matrix entries(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double si = mu.sqrt_weight(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < m; ++j) {
      entries(i, j) = k.values()(i, j) * si *
                      mu.sqrt_weight(static_cast<std::size_t>(j));
    }
  }
  return OperatorMatrix(k.measure(), std::move(entries), "K");
}

Kernel kernel_of(const OperatorMatrix& T) {
  const auto& mu = *T.measure();
  const auto m = static_cast<Eigen::Index>(mu.size());
  Matrix vals(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double si = mu.sqrt_weight(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < m; ++j) {
      vals(i, j) = T.entries()(i, j) /
                   (si * mu.sqrt_weight(static_cast<std::size_t>(j)));
    }
  }
  return Kernel(T.measure(), std::move(vals));
}

double hs_norm(const Kernel& k) {
  const auto& mu = *k.measure();
  CompensatedSum s;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < mu.size(); ++j) {
      s.add(std::norm(k(i, j)) * mu.weight(i) * mu.weight(j));
    }
  }
  return std::sqrt(s.value());
}

Conjugation::Conjugation(MeasurePtr mu, GridFunction gamma)
    : mu_(std::move(mu)), gamma_(std::move(gamma)) {
  require_same_measure(mu_, gamma_.measure(), "conjugation");
  if (!gamma_.nonvanishing()) {
    throw std::invalid_argument("conjugation: gamma must be nonvanishing");
  }
  unimodular_ = gamma_.unimodular();
}

Conjugation Conjugation::canonical(MeasurePtr mu) {
  GridFunction one = GridFunction::constant(mu, 1.0);
  return Conjugation(std::move(mu), std::move(one));
}

GridFunction conjugate(const Conjugation& c, const GridFunction& f) {
  require_same_measure(c.measure(), f.measure(), "conjugate");
  Vector v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t j = 0; j < f.size(); ++j) {
    v[static_cast<Eigen::Index>(j)] =
        std::conj(c.gamma()[j]) * std::conj(f[j]);
  }
  return GridFunction(f.measure(), std::move(v));
}

OperatorMatrix c_transform(const Conjugation& c, const OperatorMatrix& T) {
  require_same_measure(c.measure(), T.measure(), "c_transform");
  if (!c.unimodular()) {
    throw std::invalid_argument(
        "c_transform: gamma must be unimodular (C involutive)");
  }
  const auto m = static_cast<Eigen::Index>(T.dim());
  Matrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Complex gi = std::conj(c.gamma()[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m; ++j) {
      out(i, j) =
          gi * T.entries()(j, i) * c.gamma()[static_cast<std::size_t>(j)];
    }
  }
  return OperatorMatrix(T.measure(), std::move(out));
}

double c_symmetry_defect(const Conjugation& c, const OperatorMatrix& T,
                         int sign) {
  OperatorMatrix ct = c_transform(c, T);
  return (ct.entries() - static_cast<double>(sign) * T.entries()).norm();
}

}  // namespace waveops
