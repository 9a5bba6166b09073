#include "wave.hpp"

#include <cmath>
#include <stdexcept>

#include "phase.hpp"

namespace waveops {

namespace {

// Angles (in turns) of a diagonal unitary. Multiplication unitaries carry
// them exactly; otherwise they are recovered from the diagonal, which must
// be unimodular.
std::vector<double> diagonal_turns_of(const OperatorMatrix& u) {
  if (u.diagonal_turns()) return *u.diagonal_turns();
  if (!u.is_diagonal()) {
    throw std::invalid_argument(
        "propagate: U must be a diagonal unitary (general unitaries are out "
        "of scope)");
  }
  std::vector<double> turns;
  turns.reserve(u.dim());
  for (std::size_t j = 0; j < u.dim(); ++j) {
    const Complex d = u.entries()(static_cast<Eigen::Index>(j),
                                  static_cast<Eigen::Index>(j));
    if (std::abs(std::abs(d) - 1.0) > 1e-12) {
      throw std::invalid_argument("propagate: U diagonal is not unimodular");
    }
    turns.push_back(std::atan2(d.imag(), d.real()) / kTwoPi);
  }
  return turns;
}

// f_j * exp(2 pi i p theta_j), i.e. U^p f in function coordinates
GridFunction apply_power(const std::vector<double>& turns,
                         const GridFunction& f, std::int64_t p) {
  Vector v(static_cast<Eigen::Index>(f.size()));
  for (std::size_t j = 0; j < f.size(); ++j) {
    v[static_cast<Eigen::Index>(j)] = f[j] * unit_power(turns[j], p);
  }
  return GridFunction(f.measure(), std::move(v));
}

// K = X U - U X, entrywise X_ij lambda_j - lambda_i X_ij with the diagonal
// entries of U
Matrix commutator_with(const OperatorMatrix& x, const OperatorMatrix& u) {
  const auto m = static_cast<Eigen::Index>(x.dim());
  Matrix k(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      k(i, j) = x.entries()(i, j) * u.entries()(j, j) -
                u.entries()(i, i) * x.entries()(i, j);
    }
  }
  return k;
}

Matrix propagate_matrix(const Matrix& t, const std::vector<double>& turns,
                        std::int64_t n) {
  const auto m = t.rows();
  Vector phase(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    phase[j] = unit_power(turns[static_cast<std::size_t>(j)], n);
  }
  Matrix out(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out(i, j) = phase[i] * t(i, j) * std::conj(phase[j]);
    }
  }
  return out;
}

void require_same(const OperatorMatrix& a, const OperatorMatrix& b,
                  const char* what) {
  if (a.measure().get() != b.measure().get()) {
    throw std::invalid_argument(std::string(what) + ": measure mismatch");
  }
}

}  // namespace

OperatorMatrix propagate(const OperatorMatrix& u, const OperatorMatrix& t,
                         std::int64_t n) {
  require_same(u, t, "propagate");
  const std::vector<double> turns = diagonal_turns_of(u);
  return OperatorMatrix(t.measure(), propagate_matrix(t.entries(), turns, n),
                        t.tag());
}

Complex cesaro(std::span<const Complex> seq, std::size_t n_terms) {
  if (n_terms == 0 || n_terms > seq.size()) {
    throw std::invalid_argument("cesaro: need 1 <= N <= sequence length");
  }
  CesaroAccumulator acc;
  for (std::size_t i = 0; i < n_terms; ++i) acc.add(seq[i]);
  return acc.mean();
}

Complex difference_pairing(const OperatorMatrix& x, const OperatorMatrix& u,
                           const GridFunction& h1, const GridFunction& h2,
                           std::int64_t n) {
  if (n == 0) return 0.0;
  const std::vector<double> turns = diagonal_turns_of(u);
  const OperatorMatrix fwd(
      x.measure(), propagate_matrix(x.entries(), turns, n));
  const OperatorMatrix bwd(
      x.measure(), propagate_matrix(x.entries(), turns, -n));
  return inner(fwd.apply(h1), h2) - inner(bwd.apply(h1), h2);
}

Complex sum_pairing(const OperatorMatrix& x, const OperatorMatrix& u,
                    const GridFunction& h1, const GridFunction& h2,
                    std::int64_t n) {
  const std::vector<double> turns = diagonal_turns_of(u);
  const OperatorMatrix fwd(
      x.measure(), propagate_matrix(x.entries(), turns, n));
  const OperatorMatrix bwd(
      x.measure(), propagate_matrix(x.entries(), turns, -n));
  return inner(fwd.apply(h1), h2) + inner(bwd.apply(h1), h2);
}

Complex eta(const OperatorMatrix& k, const OperatorMatrix& u,
            const GridFunction& e, const GridFunction& ebar, std::int64_t kk,
            std::int64_t ll, std::int64_t m) {
  const std::vector<double> turns = diagonal_turns_of(u);
  const GridFunction lhs = k.apply(apply_power(turns, e, kk - m - 1));
  return inner(lhs, apply_power(turns, ebar, ll - m));
}

EtaSequence::EtaSequence(const OperatorMatrix& k, const OperatorMatrix& u,
                         const GridFunction& e, const GridFunction& ebar,
                         std::int64_t kk, std::int64_t ll, std::int64_t m_lo,
                         std::int64_t m_hi)
    : lo_(m_lo), hi_(m_hi), k_(kk), l_(ll) {
  if (m_hi < m_lo) throw std::invalid_argument("eta_range: empty range");
  const std::vector<double> turns = diagonal_turns_of(u);
  values_.reserve(static_cast<std::size_t>(m_hi - m_lo + 1));
  prefix_.reserve(static_cast<std::size_t>(m_hi - m_lo + 2));
  prefix_.push_back(0.0);
  Complex running = 0.0;
  for (std::int64_t m = m_lo; m <= m_hi; ++m) {
    const GridFunction lhs = k.apply(apply_power(turns, e, kk - m - 1));
    const Complex v = inner(lhs, apply_power(turns, ebar, ll - m));
    values_.push_back(v);
    running += v;
    prefix_.push_back(running);
  }
}

Complex EtaSequence::at(std::int64_t m) const {
  if (m < lo_ || m > hi_) throw std::out_of_range("eta: m outside range");
  return values_[static_cast<std::size_t>(m - lo_)];
}

Complex EtaSequence::range_sum(std::int64_t p, std::int64_t q) const {
  if (p < lo_ || q > hi_) {
    throw std::out_of_range("eta formal sum: range not materialized");
  }
  return prefix_[static_cast<std::size_t>(q - lo_ + 1)] -
         prefix_[static_cast<std::size_t>(p - lo_)];
}

Complex EtaSequence::formal_sum(std::int64_t p, std::int64_t q) const {
  if (p <= q) return range_sum(p, q);
  if (p == q + 1) return 0.0;
  return -range_sum(q + 1, p - 1);
}

double EtaSequence::max_abs() const {
  double worst = 0.0;
  for (const Complex& v : values_) worst = std::max(worst, std::abs(v));
  return worst;
}

EtaSequence eta_range(const OperatorMatrix& k, const OperatorMatrix& u,
                      const GridFunction& e, const GridFunction& ebar,
                      std::int64_t kk, std::int64_t ll, std::int64_t m_lo,
                      std::int64_t m_hi) {
  return EtaSequence(k, u, e, ebar, kk, ll, m_lo, m_hi);
}

double verify_telescoping(const OperatorMatrix& x, const OperatorMatrix& u,
                          std::int64_t p, std::int64_t q) {
  require_same(x, u, "verify_telescoping");
  const std::vector<double> turns = diagonal_turns_of(u);
  const Matrix k = commutator_with(x, u);
  const auto m = static_cast<Eigen::Index>(x.dim());

  const Matrix lhs = propagate_matrix(x.entries(), turns, p) -
                     propagate_matrix(x.entries(), turns, q);

  // sum_{t=p}^{q-1} U^t K U^{-t-1}, with the formal convention for q <= p
  Matrix rhs = Matrix::Zero(m, m);
  const auto add_term = [&](std::int64_t t, double sign) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const Complex a = unit_power(turns[static_cast<std::size_t>(i)], t);
      for (Eigen::Index j = 0; j < m; ++j) {
        rhs(i, j) += sign * a * k(i, j) *
                     unit_power(turns[static_cast<std::size_t>(j)], -t - 1);
      }
    }
  };
  if (p <= q - 1) {
    for (std::int64_t t = p; t <= q - 1; ++t) add_term(t, 1.0);
  } else if (p > q) {
    for (std::int64_t t = q; t <= p - 1; ++t) add_term(t, -1.0);
  }

  return (lhs - rhs).cwiseAbs().maxCoeff();
}

namespace {

struct LemmaContext {
  std::vector<double> turns;
  Matrix k;  // commutator matrix
  GridFunction ebar;
  double k_scale;
};

LemmaContext lemma_context(const OperatorMatrix& x, const OperatorMatrix& u,
                           const GridFunction& gamma, const GridFunction& e,
                           int precondition_sign, const char* what) {
  require_same(x, u, what);
  const Conjugation c(x.measure(), gamma);
  if (!c.unimodular()) {
    throw std::invalid_argument(std::string(what) +
                                ": gamma must be unimodular");
  }
  LemmaContext ctx{diagonal_turns_of(u), commutator_with(x, u),
                   conjugate(c, e), 0.0};
  ctx.k_scale = ctx.k.norm();
  // C K* C = sign*K, entrywise conj(gamma_i) K_ji gamma_j = sign*K_ij
  double defect_sq = 0.0;
  const auto m = static_cast<Eigen::Index>(x.dim());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const Complex lhs = std::conj(gamma[static_cast<std::size_t>(i)]) *
                          ctx.k(j, i) * gamma[static_cast<std::size_t>(j)];
      defect_sq +=
          std::norm(lhs - static_cast<double>(precondition_sign) * ctx.k(i, j));
    }
  }
  const double defect = std::sqrt(defect_sq);
  if (defect > 1e-10 * std::max(ctx.k_scale, 1e-300)) {
    throw std::invalid_argument(
        std::string(what) + ": precondition C K* C = " +
        (precondition_sign < 0 ? "-" : "+") + std::string("K violated") +
        " (defect " + std::to_string(defect) + ")");
  }
  return ctx;
}

}  // namespace

double verify_lemma_difference(const OperatorMatrix& x,
                               const OperatorMatrix& u,
                               const GridFunction& gamma,
                               const GridFunction& e, std::int64_t k,
                               std::int64_t l, std::int64_t n) {
  LemmaContext ctx =
      lemma_context(x, u, gamma, e, -1, "verify_lemma_difference");

  const GridFunction uk_e = apply_power(ctx.turns, e, k);
  const GridFunction ul_ebar = apply_power(ctx.turns, ctx.ebar, l);
  const OperatorMatrix fwd(
      x.measure(), propagate_matrix(x.entries(), ctx.turns, n));
  const OperatorMatrix bwd(
      x.measure(), propagate_matrix(x.entries(), ctx.turns, -n));
  const Complex lhs =
      inner(fwd.apply(uk_e), ul_ebar) - inner(bwd.apply(uk_e), ul_ebar);

  const OperatorMatrix pk(x.measure(), propagate_matrix(ctx.k, ctx.turns, n));
  Complex rhs = 0.0;
  const auto term = [&](std::int64_t m) {
    return inner(pk.apply(apply_power(ctx.turns, e, k - m)),
                 apply_power(ctx.turns, ctx.ebar, l - m + 1));
  };
  if (k + l >= 1) {
    for (std::int64_t m = 1; m <= k + l; ++m) rhs += term(m);
  } else if (k + l < 0) {
    for (std::int64_t m = k + l + 1; m <= 0; ++m) rhs -= term(m);
  }

  return std::abs(lhs - rhs);
}

double verify_lemma_sum(const OperatorMatrix& x, const OperatorMatrix& u,
                        const GridFunction& gamma, const GridFunction& e,
                        std::int64_t k, std::int64_t l, std::int64_t n) {
  LemmaContext ctx = lemma_context(x, u, gamma, e, +1, "verify_lemma_sum");

  const GridFunction uk_e = apply_power(ctx.turns, e, k);
  const GridFunction ul_ebar = apply_power(ctx.turns, ctx.ebar, l);
  const OperatorMatrix fwd(
      x.measure(), propagate_matrix(x.entries(), ctx.turns, n));
  const OperatorMatrix bwd(
      x.measure(), propagate_matrix(x.entries(), ctx.turns, -n));
  const Complex lhs =
      inner(fwd.apply(uk_e), ul_ebar) + inner(bwd.apply(uk_e), ul_ebar);

  const OperatorMatrix shift(
      x.measure(), propagate_matrix(x.entries(), ctx.turns, k + l));
  Complex rhs =
      inner(x.apply(uk_e), ul_ebar) + inner(shift.apply(uk_e), ul_ebar);

  const OperatorMatrix pk(x.measure(), propagate_matrix(ctx.k, ctx.turns, n));
  const auto term = [&](std::int64_t m) {
    return inner(pk.apply(apply_power(ctx.turns, e, k - m)),
                 apply_power(ctx.turns, ctx.ebar, l - m + 1));
  };
  if (k + l >= 1) {
    for (std::int64_t m = 1; m <= k + l; ++m) rhs += term(m);
  } else if (k + l < 0) {
    for (std::int64_t m = k + l + 1; m <= 0; ++m) rhs -= term(m);
  }

  return std::abs(lhs - rhs);
}

YConstruction construct_Y(const OperatorMatrix& x, const OperatorMatrix& u,
                          const GridFunction& gamma, std::int64_t n_terms) {
  require_same(x, u, "construct_Y");
  if (n_terms < 1) throw std::invalid_argument("construct_Y: N must be >= 1");
  const std::vector<double> turns = diagonal_turns_of(u);
  const auto m = static_cast<Eigen::Index>(x.dim());

  // Y_n = X - (U^n X U^-n + U^-n X U^n)/2; the mean over n of the phase
  // factors is accumulated entrywise (the two directions are conjugate, so
  // only the real part of the forward factor survives).
  Matrix factor_sum = Matrix::Zero(m, m);
  Vector phase(m);
  for (std::int64_t n = 0; n < n_terms; ++n) {
    for (Eigen::Index j = 0; j < m; ++j) {
      phase[j] = unit_power(turns[static_cast<std::size_t>(j)], n);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        factor_sum(i, j) += phase[i] * std::conj(phase[j]);
      }
    }
  }
  Matrix y(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      y(i, j) = x.entries()(i, j) *
                (1.0 - factor_sum(i, j).real() / static_cast<double>(n_terms));
    }
  }
  OperatorMatrix y_op(x.measure(), std::move(y), "Y");

  const Matrix k = commutator_with(x, u);
  const Matrix yk = commutator_with(y_op, u);
  const double d1 = (yk - k).norm();
  const Conjugation c(x.measure(), gamma);
  const double d2 = c_symmetry_defect(c, y_op, +1);
  return {std::move(y_op), d1, d2, x.operator_norm()};
}

double check_proposition_forward(const OperatorMatrix& x,
                                 const OperatorMatrix& u,
                                 const GridFunction& gamma, double input_tol) {
  require_same(x, u, "check_proposition_forward");
  const Conjugation c(x.measure(), gamma);
  const double input_defect = c_symmetry_defect(c, x, +1);
  if (input_defect > input_tol * std::max(x.frobenius_norm(), 1e-300)) {
    throw std::invalid_argument(
        "check_proposition_forward: input is not C-symmetric (defect " +
        std::to_string(input_defect) + ")");
  }
  const OperatorMatrix k(x.measure(), commutator_with(x, u), "K");
  return c_symmetry_defect(c, k, -1);
}

IdentityGridSummary identity_grid(const OperatorMatrix& x,
                                  const OperatorMatrix& u,
                                  const GridFunction& gamma,
                                  const GridFunction& e, KernelSign sign,
                                  std::int64_t k_min, std::int64_t k_max,
                                  std::int64_t l_min, std::int64_t l_max,
                                  std::span<const std::int64_t> n_values) {
  if (k_min > k_max || l_min > l_max || n_values.empty()) {
    throw std::invalid_argument("identity_grid: empty grid");
  }
  const int pre_sign = sign == KernelSign::antisymmetric ? -1 : +1;
  LemmaContext ctx = lemma_context(x, u, gamma, e, pre_sign, "identity_grid");

  IdentityGridSummary summary;
  {
    double defect_sq = 0.0;
    const auto mm = static_cast<Eigen::Index>(x.dim());
    for (Eigen::Index i = 0; i < mm; ++i) {
      for (Eigen::Index j = 0; j < mm; ++j) {
        const Complex lhs = std::conj(gamma[static_cast<std::size_t>(i)]) *
                            ctx.k(j, i) * gamma[static_cast<std::size_t>(j)];
        defect_sq += std::norm(lhs - static_cast<double>(pre_sign) * ctx.k(i, j));
      }
    }
    summary.precondition_defect = std::sqrt(defect_sq);
  }
  summary.lemma_scale = x.operator_norm() * e.norm() * e.norm();

  std::int64_t n_max = 0;
  for (std::int64_t n : n_values) {
    if (n < 0) throw std::invalid_argument("identity_grid: n must be >= 0");
    n_max = std::max(n_max, n);
  }

  const auto mdim = static_cast<Eigen::Index>(x.dim());
  const Vector e_ortho = e.ortho();
  const Vector ebar_ortho = ctx.ebar.ortho();

  // power caches: u_a = D^a e, w_b = D^b ebar (orthonormal coordinates).
  // Ranges cover the lemma right-hand sides and the eta windows
  // m in [-W, W + k + l] with W = n_max + 16.
  const std::int64_t w_span = n_max + 16;
  const std::int64_t a_lo =
      std::min({k_min, std::min(k_min, -l_max) - 1, -w_span - l_max - 1});
  const std::int64_t a_hi = std::max(
      {k_max, std::max(k_max, -l_min) + 1, k_max + w_span - 1});
  const std::int64_t b_lo =
      std::min({l_min, std::min(std::int64_t{1} - k_max, l_min + 1) - 1,
                -w_span - k_max});
  const std::int64_t b_hi =
      std::max({l_max, std::max(l_max, -k_min) + 1, l_max + w_span});
  const auto cache_powers = [&](const Vector& base, std::int64_t lo,
                                std::int64_t hi) {
    std::vector<Vector> cache;
    cache.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t p = lo; p <= hi; ++p) {
      Vector v(mdim);
      for (Eigen::Index j = 0; j < mdim; ++j) {
        v[j] = base[j] * unit_power(ctx.turns[static_cast<std::size_t>(j)], p);
      }
      cache.push_back(std::move(v));
    }
    return cache;
  };
  const std::vector<Vector> u_pow = cache_powers(e_ortho, a_lo, a_hi);
  const std::vector<Vector> w_pow = cache_powers(ebar_ortho, b_lo, b_hi);
  const auto u_at = [&](std::int64_t a) -> const Vector& {
    return u_pow[static_cast<std::size_t>(a - a_lo)];
  };
  const auto w_at = [&](std::int64_t b) -> const Vector& {
    return w_pow[static_cast<std::size_t>(b - b_lo)];
  };

  const double eta_floor = 1e-300;

  // eta tables: g_a = K u_a, eta_m^{(k,l)} = (g_{k-m-1}, w_{l-m})
  std::vector<Vector> g;
  g.reserve(u_pow.size());
  for (const Vector& v : u_pow) g.push_back(ctx.k * v);
  const auto g_at = [&](std::int64_t a) -> const Vector& {
    return g[static_cast<std::size_t>(a - a_lo)];
  };

  // first pass: materialize every eta window and the instance-wide scale.
  // Individual (k, l) windows can consist entirely of symmetry-forced zeros
  // (periodic measures do this), so defects are normalized globally.
  const std::int64_t window_lo = -w_span;
  std::vector<std::vector<Complex>> eta_windows;
  eta_windows.reserve(
      static_cast<std::size_t>((k_max - k_min + 1) * (l_max - l_min + 1)));
  double eta_scale = 0.0;
  for (std::int64_t k = k_min; k <= k_max; ++k) {
    for (std::int64_t l = l_min; l <= l_max; ++l) {
      const std::int64_t window_hi = w_span + k + l;
      std::vector<Complex> etas;
      etas.reserve(static_cast<std::size_t>(window_hi - window_lo + 1));
      for (std::int64_t m = window_lo; m <= window_hi; ++m) {
        const Complex v = w_at(l - m).dot(g_at(k - m - 1));
        etas.push_back(v);
        eta_scale = std::max(eta_scale, std::abs(v));
      }
      eta_windows.push_back(std::move(etas));
    }
  }

  // second pass: pair symmetry and window cancellation per (k, l)
  std::size_t window_index = 0;
  for (std::int64_t k = k_min; k <= k_max; ++k) {
    for (std::int64_t l = l_min; l <= l_max; ++l, ++window_index) {
      const std::vector<Complex>& etas = eta_windows[window_index];
      const std::int64_t window_hi = w_span + k + l;
      const auto eta_at = [&](std::int64_t m) {
        return etas[static_cast<std::size_t>(m - window_lo)];
      };
      std::vector<Complex> prefix{0.0};
      prefix.reserve(etas.size() + 1);
      for (const Complex& v : etas) prefix.push_back(prefix.back() + v);
      const auto eta_sum = [&](std::int64_t p, std::int64_t q) -> Complex {
        if (p == q + 1) return 0.0;
        if (p > q) {
          return -(prefix[static_cast<std::size_t>(p - 1 - window_lo + 1)] -
                   prefix[static_cast<std::size_t>(q + 1 - window_lo)]);
        }
        return prefix[static_cast<std::size_t>(q - window_lo + 1)] -
               prefix[static_cast<std::size_t>(p - window_lo)];
      };

      // pair symmetry: eta_m = pre_sign * eta_{k+l-1-m}
      // (minus for the difference case, plus for the sum case)
      for (std::int64_t m = window_lo; m <= window_hi; ++m) {
        const std::int64_t mm = k + l - 1 - m;
        if (mm < window_lo || mm > window_hi) continue;
        const Complex defect =
            eta_at(m) - static_cast<double>(pre_sign) * eta_at(mm);
        const double rel =
            std::abs(defect) / std::max(eta_scale, eta_floor);
        if (rel > summary.max_eta_pair_defect) {
          summary.max_eta_pair_defect = rel;
        }
      }

      // window cancellation (difference case): sum_{m=-n}^{n+k+l-1} eta_m = 0
      if (sign == KernelSign::antisymmetric) {
        for (std::int64_t n : n_values) {
          const Complex s = eta_sum(-n, n + k + l - 1);
          double window_abs = 0.0;
          const std::int64_t lo = std::min(-n, n + k + l);
          const std::int64_t hi = std::max(n + k + l - 1, -n - 1);
          for (std::int64_t m = lo; m <= hi; ++m) {
            window_abs += std::abs(eta_at(m));
          }
          const double rel =
              std::abs(s) / std::max({window_abs, eta_scale, eta_floor});
          if (rel > summary.max_eta_window_defect) {
            summary.max_eta_window_defect = rel;
          }
        }
      }
    }
  }

  // boundary terms of the sum identity, independent of n:
  // (X u_k, w_l) + (U^{k+l} X U^{-(k+l)} u_k, w_l)
  const bool difference = sign == KernelSign::antisymmetric;
  Eigen::MatrixXcd boundary;
  if (!difference) {
    boundary.resize(static_cast<Eigen::Index>(k_max - k_min + 1),
                    static_cast<Eigen::Index>(l_max - l_min + 1));
    std::vector<Vector> xu;
    xu.reserve(static_cast<std::size_t>(k_max - k_min + 1));
    for (std::int64_t k = k_min; k <= k_max; ++k) {
      xu.push_back(x.entries() * u_at(k));
    }
    for (std::int64_t s = k_min + l_min; s <= k_max + l_max; ++s) {
      const Matrix shift = propagate_matrix(x.entries(), ctx.turns, s);
      for (std::int64_t k = k_min; k <= k_max; ++k) {
        const std::int64_t l = s - k;
        if (l < l_min || l > l_max) continue;
        boundary(static_cast<Eigen::Index>(k - k_min),
                 static_cast<Eigen::Index>(l - l_min)) =
            w_at(l).dot(xu[static_cast<std::size_t>(k - k_min)]) +
            w_at(l).dot(shift * u_at(k));
      }
    }
  }

  // lemma identities per n, sharing the propagated matrices
  for (std::int64_t n : n_values) {
    const Matrix fwd = propagate_matrix(x.entries(), ctx.turns, n);
    const Matrix bwd = propagate_matrix(x.entries(), ctx.turns, -n);
    const Matrix pk = propagate_matrix(ctx.k, ctx.turns, n);

    std::vector<Vector> lhs_vec;
    lhs_vec.reserve(static_cast<std::size_t>(k_max - k_min + 1));
    for (std::int64_t k = k_min; k <= k_max; ++k) {
      if (difference) {
        lhs_vec.push_back(fwd * u_at(k) - bwd * u_at(k));
      } else {
        lhs_vec.push_back(fwd * u_at(k) + bwd * u_at(k));
      }
    }
    const std::int64_t pk_lo = std::min(k_min, -l_max) - 1;
    const std::int64_t pk_hi = std::max(k_max, -l_min) + 1;
    std::vector<Vector> pk_vec;
    pk_vec.reserve(static_cast<std::size_t>(pk_hi - pk_lo + 1));
    for (std::int64_t a = pk_lo; a <= pk_hi; ++a) {
      pk_vec.push_back(pk * u_at(a));
    }
    const auto pk_at = [&](std::int64_t a) -> const Vector& {
      return pk_vec[static_cast<std::size_t>(a - pk_lo)];
    };

    for (std::int64_t k = k_min; k <= k_max; ++k) {
      for (std::int64_t l = l_min; l <= l_max; ++l) {
        Complex lhs =
            w_at(l).dot(lhs_vec[static_cast<std::size_t>(k - k_min)]);
        Complex rhs = 0.0;
        if (!difference) {
          rhs += boundary(static_cast<Eigen::Index>(k - k_min),
                          static_cast<Eigen::Index>(l - l_min));
        }
        const auto term = [&](std::int64_t m) {
          return w_at(l - m + 1).dot(pk_at(k - m));
        };
        if (k + l >= 1) {
          for (std::int64_t m = 1; m <= k + l; ++m) rhs += term(m);
        } else if (k + l < 0) {
          for (std::int64_t m = k + l + 1; m <= 0; ++m) rhs -= term(m);
        }
        const double residual = std::abs(lhs - rhs);
        if (residual > summary.max_lemma_residual) {
          summary.max_lemma_residual = residual;
          summary.worst_k = k;
          summary.worst_l = l;
          summary.worst_n = n;
        }
      }
    }
  }

  return summary;
}

}  // namespace waveops
