#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "experiment.hpp"
#include "phase.hpp"
#include "rng.hpp"
#include "wave.hpp"

using namespace waveops;

namespace {

OperatorMatrix random_operator(const MeasurePtr& mu, std::uint64_t seed) {
  Rng rng(seed);
  const auto m = static_cast<Eigen::Index>(mu->size());
  Matrix x(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) x(i, j) = rng.complex_normal();
  }
  return OperatorMatrix(mu, std::move(x), "X");
}

// X from a random kernel of the given class, so K = XU - UX matches it
OperatorMatrix commutator_solution(const MeasurePtr& mu, SymmetryClass cls,
                                   std::uint64_t seed) {
  const Kernel k = random_kernel(mu, cls, seed);
  return integral_operator(solve_identification(k).x);
}

}  // namespace

TEST_SUITE_BEGIN("wave");

TEST_CASE("propagate: identity at n=0, diagonal invariance, power oracle") {
  const MeasurePtr mu = make_uniform(4);
  const OperatorMatrix u = multiplication_unitary(mu);
  const OperatorMatrix t = random_operator(mu, 1);

  const OperatorMatrix at0 = propagate(u, t, 0);
  CHECK((at0.entries() - t.entries()).cwiseAbs().maxCoeff() == 0.0);

  const GridFunction phi = GridFunction::monomial(mu, 2);
  const OperatorMatrix diag = multiplication_by(phi);
  for (std::int64_t n : {-5, 1, 9}) {
    CHECK((propagate(u, diag, n).entries() - diag.entries())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }

  // repeated-multiplication oracle at n = 7
  Matrix oracle = t.entries();
  for (int rep = 0; rep < 7; ++rep) {
    oracle = u.entries() * oracle * u.adjoint().entries();
  }
  CHECK((propagate(u, t, 7).entries() - oracle).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("propagate rejects non-diagonal conjugators") {
  const MeasurePtr mu = make_uniform(4);
  const OperatorMatrix t = random_operator(mu, 2);
  CHECK_THROWS_AS(propagate(t, t, 3), std::invalid_argument);
}

TEST_CASE("cesaro: constants, the quarter-turn value, the geometric bound") {
  std::vector<Complex> constant(10, Complex(2.5, -1.0));
  for (std::size_t n = 1; n <= 10; ++n) {
    CHECK(std::abs(cesaro(constant, n) - Complex(2.5, -1.0)) < 1e-15);
  }

  // mean of 1, i, -1 is i/3
  std::vector<Complex> quarter;
  for (int n = 0; n < 4; ++n) quarter.push_back(unit_power(0.25, n));
  CHECK(std::abs(cesaro(quarter, 3) - Complex(0.0, 1.0 / 3.0)) < 1e-15);

  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const double turns = rng.uniform(0.02, 0.98);
    const std::size_t n_terms = 1 + rng.bits() % 400;
    std::vector<Complex> seq;
    for (std::size_t n = 0; n < n_terms; ++n) {
      seq.push_back(unit_power(turns, static_cast<std::int64_t>(n)));
    }
    const double bound =
        2.0 / (static_cast<double>(n_terms) *
               std::abs(1.0 - circle_exp(turns)));
    CHECK(std::abs(cesaro(seq, n_terms)) <= bound * (1 + 1e-12));
  }
}

TEST_CASE("pairings: zero at n=0, doubled at n=0, diagonal commutation") {
  const MeasurePtr mu = make_cantor(4);
  const OperatorMatrix u = multiplication_unitary(mu);
  const OperatorMatrix x = random_operator(mu, 4);
  Rng rng(5);
  Vector v1(16), v2(16);
  for (Eigen::Index j = 0; j < 16; ++j) {
    v1[j] = rng.complex_normal();
    v2[j] = rng.complex_normal();
  }
  const GridFunction h1(mu, v1), h2(mu, v2);

  CHECK(difference_pairing(x, u, h1, h2, 0) == Complex(0.0, 0.0));
  CHECK(std::abs(sum_pairing(x, u, h1, h2, 0) -
                 2.0 * inner(x.apply(h1), h2)) < 1e-12);

  const OperatorMatrix diag =
      multiplication_by(GridFunction::monomial(mu, 3));
  for (std::int64_t n : {1, 8, 100}) {
    CHECK(std::abs(difference_pairing(diag, u, h1, h2, n)) < 1e-12);
  }
}

TEST_CASE("eta: zero commutator, formal sums, pair antisymmetry") {
  const MeasurePtr mu = make_cantor(5);
  const OperatorMatrix u = multiplication_unitary(mu);
  const GridFunction one = GridFunction::constant(mu, 1.0);

  const OperatorMatrix zero(mu, Matrix::Zero(32, 32));
  for (std::int64_t m : {-3, 0, 7}) {
    CHECK(eta(zero, u, one, one, 2, 1, m) == Complex(0.0, 0.0));
  }

  const OperatorMatrix x = commutator_solution(mu, SymmetryClass::antisymmetric, 6);
  const OperatorMatrix k_op(mu, (x * u - u * x).entries(), "K");
  const GridFunction ebar = conjugate(Conjugation::canonical(mu), one);
  const std::int64_t kk = 3, ll = -1;
  const EtaSequence seq = eta_range(k_op, u, one, ebar, kk, ll, -20, 25);

  // formal sum conventions
  CHECK(seq.formal_sum(5, 4) == Complex(0.0, 0.0));
  CHECK(std::abs(seq.formal_sum(7, 3) + seq.formal_sum(4, 6)) < 1e-14);

  // values agree with the single-eta evaluator
  for (std::int64_t m : {-20, -3, 0, 11, 25}) {
    CHECK(std::abs(seq.at(m) - eta(k_op, u, one, ebar, kk, ll, m)) < 1e-13);
  }

  // antisymmetric commutator: eta_p = -eta_q whenever p + q = k + l - 1
  double worst = 0.0;
  for (std::int64_t p = -20; p <= 22; ++p) {
    const std::int64_t q = kk + ll - 1 - p;
    if (q < -20 || q > 25) continue;
    worst = std::max(worst, std::abs(seq.at(p) + seq.at(q)));
  }
  CHECK(worst < 1e-12 * std::max(seq.max_abs(), 1e-300));

  // literal window cancellation: sum_{m=-n}^{n+k+l-1} eta_m = 0
  for (std::int64_t n : {0, 1, 5, 9}) {
    CHECK(std::abs(seq.formal_sum(-n, n + kk + ll - 1)) <
          1e-12 * std::max(seq.max_abs() * (2.0 * n + 4.0), 1e-300));
  }
}

TEST_CASE("telescoping identity across formal ranges") {
  const MeasurePtr mu = make_cantor(5);
  const OperatorMatrix u = multiplication_unitary(mu);
  const OperatorMatrix x = random_operator(mu, 7);
  const double x_norm = x.operator_norm();

  CHECK(verify_telescoping(x, u, 3, 3) == 0.0);

  // p = 0, q = 1 reduces to X - U X U^-1 = K U^-1
  const Matrix k = (x * u - u * x).entries();
  const Matrix lhs = x.entries() - propagate(u, x, 1).entries();
  const Matrix rhs = k * u.adjoint().entries();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * x_norm);
  CHECK(verify_telescoping(x, u, 0, 1) < 1e-12 * x_norm);

  for (const auto& [p, q] : std::vector<std::pair<std::int64_t, std::int64_t>>{
           {-8, 11}, {11, -8}, {-64, 64}, {64, -64}, {0, 64}}) {
    CHECK(verify_telescoping(x, u, p, q) <= 1e-10 * x_norm);
  }
}

TEST_CASE("difference lemma: empty sums, zero n, randomized instances") {
  const MeasurePtr mu = make_cantor(6);
  const OperatorMatrix u = multiplication_unitary(mu);
  const GridFunction one = GridFunction::constant(mu, 1.0);
  const OperatorMatrix x =
      commutator_solution(mu, SymmetryClass::antisymmetric, 8);
  const double scale = x.operator_norm();  // ||e|| = 1

  // k + l = 0: the right side is the empty sum, the left side must vanish
  CHECK(verify_lemma_difference(x, u, one, one, 2, -2, 13) < 1e-10 * scale);
  // n = 0: both sides vanish (the sum collapses by the window cancellation)
  CHECK(verify_lemma_difference(x, u, one, one, 3, 2, 0) < 1e-10 * scale);
  // a generic instance away from the edge cases
  CHECK(verify_lemma_difference(x, u, one, one, 3, 2, 25) < 1e-10 * scale);
  // negative k + l exercises the formal sum
  CHECK(verify_lemma_difference(x, u, one, one, -3, -2, 7) < 1e-10 * scale);

  // violated precondition is rejected
  const OperatorMatrix bad = random_operator(mu, 9);
  CHECK_THROWS_AS(verify_lemma_difference(bad, u, one, one, 1, 1, 2),
                  std::invalid_argument);
}

TEST_CASE("difference lemma with a nontrivial unimodular gamma") {
  const MeasurePtr mu = make_random(24, 10);
  const OperatorMatrix u = multiplication_unitary(mu);
  Rng rng(11);
  Vector gv(24);
  for (Eigen::Index j = 0; j < 24; ++j) gv[j] = rng.unit_circle();
  const GridFunction gamma(mu, gv);

  // K = diag(conj(gamma)) B with B antisymmetric satisfies C K* C = -K
  const Kernel b = random_kernel(mu, SymmetryClass::antisymmetric, 12);
  Matrix scaled = b.values();
  for (Eigen::Index i = 0; i < 24; ++i) {
    scaled.row(i) *= std::conj(gv[i]);
  }
  const OperatorMatrix x =
      integral_operator(solve_identification(Kernel(mu, scaled)).x);
  const GridFunction one = GridFunction::constant(mu, 1.0);
  const double scale = x.operator_norm();
  for (std::int64_t n : {0, 1, 7, 25}) {
    CHECK(verify_lemma_difference(x, u, gamma, one, 2, 1, n) < 1e-10 * scale);
  }
}

TEST_CASE("sum lemma: boundary term and eta symmetry") {
  const MeasurePtr mu = make_cantor(6);
  const OperatorMatrix u = multiplication_unitary(mu);
  const GridFunction one = GridFunction::constant(mu, 1.0);
  const OperatorMatrix x =
      commutator_solution(mu, SymmetryClass::symmetric, 13);
  const double scale = x.operator_norm();

  for (const auto& [k, l, n] :
       std::vector<std::array<std::int64_t, 3>>{{1, 1, 10},
                                                {0, 0, 0},
                                                {3, 2, 25},
                                                {-3, 1, 7},
                                                {4, -4, 64}}) {
    CHECK(verify_lemma_sum(x, u, one, one, k, l, n) < 1e-10 * scale);
  }

  // eta symmetry eta_m = eta_{k+l-1-m} for the symmetric class
  const OperatorMatrix k_op(mu, (x * u - u * x).entries(), "K");
  const EtaSequence seq = eta_range(k_op, u, one, one, 2, 2, -30, 33);
  double worst = 0.0;
  for (std::int64_t m = -30; m <= 33; ++m) {
    const std::int64_t mm = 2 + 2 - 1 - m;
    if (mm < -30 || mm > 33) continue;
    worst = std::max(worst, std::abs(seq.at(m) - seq.at(mm)));
  }
  CHECK(worst < 1e-12 * std::max(seq.max_abs(), 1e-300));

  // commuting X with k + l = 0: both sides are 2 (X U^k e, U^l ebar)
  const OperatorMatrix diag =
      multiplication_by(GridFunction::monomial(mu, 1));
  CHECK(verify_lemma_sum(diag, u, one, one, 2, -2, 9) < 1e-12);
}

TEST_CASE("identity grid matches the per-call lemma ops") {
  const MeasurePtr mu = make_cantor(5);
  const OperatorMatrix u = multiplication_unitary(mu);
  const GridFunction one = GridFunction::constant(mu, 1.0);
  const std::vector<std::int64_t> ns = {0, 1, 2, 7};

  for (int sign_case = 0; sign_case < 2; ++sign_case) {
    const KernelSign sign = sign_case == 0 ? KernelSign::antisymmetric
                                           : KernelSign::symmetric;
    const OperatorMatrix x = commutator_solution(
        mu,
        sign == KernelSign::antisymmetric ? SymmetryClass::antisymmetric
                                          : SymmetryClass::symmetric,
        14 + static_cast<std::uint64_t>(sign_case));
    const IdentityGridSummary summary =
        identity_grid(x, u, one, one, sign, -2, 2, -2, 2, ns);

    double per_call_worst = 0.0;
    for (std::int64_t k = -2; k <= 2; ++k) {
      for (std::int64_t l = -2; l <= 2; ++l) {
        for (std::int64_t n : ns) {
          const double r =
              sign == KernelSign::antisymmetric
                  ? verify_lemma_difference(x, u, one, one, k, l, n)
                  : verify_lemma_sum(x, u, one, one, k, l, n);
          per_call_worst = std::max(per_call_worst, r);
        }
      }
    }
    CHECK(std::abs(summary.max_lemma_residual - per_call_worst) <
          1e-12 * std::max(summary.lemma_scale, 1.0));
    CHECK(summary.max_lemma_residual <= 1e-10 * summary.lemma_scale);
    CHECK(summary.max_eta_pair_defect <= 1e-12);
    if (sign == KernelSign::antisymmetric) {
      CHECK(summary.max_eta_window_defect <= 1e-12);
    }
  }
}

TEST_CASE("construct_Y: commuting case, exact symmetry, 1/N commutator decay") {
  const MeasurePtr mu = make_cantor(5);
  const OperatorMatrix u = multiplication_unitary(mu);
  const GridFunction one = GridFunction::constant(mu, 1.0);

  const OperatorMatrix diag =
      multiplication_by(GridFunction::monomial(mu, 2));
  const YConstruction trivial = construct_Y(diag, u, one, 64);
  CHECK(trivial.y.frobenius_norm() == 0.0);
  CHECK(trivial.commutator_defect == 0.0);
  CHECK(trivial.symmetry_defect == 0.0);

  // C-symmetrized X: X <- (X + C X* C)/2
  const OperatorMatrix raw = random_operator(mu, 15);
  const Conjugation c = Conjugation::canonical(mu);
  const OperatorMatrix x(
      mu, (raw.entries() + c_transform(c, raw).entries()) / 2.0, "Xs");
  const double x_norm = x.operator_norm();

  double previous = 1e300;
  for (std::int64_t n_terms : {50, 100, 200, 400}) {
    const YConstruction y = construct_Y(x, u, one, n_terms);
    CHECK(y.symmetry_defect <= 1e-10 * x_norm);
    CHECK(y.commutator_defect <= 4.0 * x_norm / static_cast<double>(n_terms));
    CHECK(y.commutator_defect < previous);
    previous = y.commutator_defect;
  }

  // closed-form oracle: Y entries are X_ij (1 - Re(g_N(omega_ij)))
  const std::int64_t n_terms = 37;
  const YConstruction y = construct_Y(x, u, one, n_terms);
  Matrix oracle(32, 32);
  for (Eigen::Index i = 0; i < 32; ++i) {
    for (Eigen::Index j = 0; j < 32; ++j) {
      Complex gsum = 0.0;
      for (std::int64_t n = 0; n < n_terms; ++n) {
        gsum += unit_power(mu->theta(static_cast<std::size_t>(i)) -
                               mu->theta(static_cast<std::size_t>(j)),
                           n);
      }
      oracle(i, j) = x.entries()(i, j) *
                     (1.0 - gsum.real() / static_cast<double>(n_terms));
    }
  }
  CHECK((y.y.entries() - oracle).cwiseAbs().maxCoeff() < 1e-12 * x_norm);
}

TEST_CASE("proposition forward: identity, symmetrized ensembles") {
  const MeasurePtr mu = make_cantor(5);
  const OperatorMatrix u = multiplication_unitary(mu);
  const GridFunction one = GridFunction::constant(mu, 1.0);

  const OperatorMatrix id(mu, Matrix::Identity(32, 32));
  CHECK(check_proposition_forward(id, u, one) < 1e-14);

  const Conjugation c = Conjugation::canonical(mu);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const OperatorMatrix raw = random_operator(mu, 100 + seed);
    const OperatorMatrix x(
        mu, (raw.entries() + c_transform(c, raw).entries()) / 2.0);
    CHECK(check_proposition_forward(x, u, one) <=
          1e-10 * x.operator_norm());
  }

  // non-symmetric input is rejected
  const OperatorMatrix raw = random_operator(mu, 200);
  CHECK_THROWS_AS(check_proposition_forward(raw, u, one),
                  std::invalid_argument);
}

TEST_CASE("off-diagonal Cesaro decay bound for propagated operators") {
  const MeasurePtr mu = make_random(12, 16);
  const OperatorMatrix u = multiplication_unitary(mu);
  Kernel k = random_kernel(mu, SymmetryClass::none, 17);
  const OperatorMatrix t = integral_operator(k);

  for (std::int64_t n_terms : {8, 64, 512}) {
    Matrix mean = Matrix::Zero(12, 12);
    for (std::int64_t n = 0; n < n_terms; ++n) {
      mean += propagate(u, t, n).entries();
    }
    mean /= static_cast<double>(n_terms);
    for (Eigen::Index i = 0; i < 12; ++i) {
      for (Eigen::Index j = 0; j < 12; ++j) {
        if (i == j) continue;
        const double gap =
            std::abs(1.0 - mu->point(static_cast<std::size_t>(i)) *
                               std::conj(mu->point(static_cast<std::size_t>(j))));
        const double bound = std::abs(t.entries()(i, j)) * 2.0 /
                             (static_cast<double>(n_terms) * gap);
        CHECK(std::abs(mean(i, j)) <= bound * (1 + 1e-9) + 1e-15);
      }
    }
  }
}

TEST_SUITE_END();
