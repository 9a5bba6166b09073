#include "symmetry.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include <json.hpp>

namespace waveops {

const char* to_string(KernelSign sign) {
  return sign == KernelSign::antisymmetric ? "antisymmetric" : "symmetric";
}

const char* to_string(Witness::Kind kind) {
  switch (kind) {
    case Witness::Kind::zero_pattern:
      return "zero_pattern";
    case Witness::Kind::diagonal:
      return "diagonal";
    case Witness::Kind::inconsistent_cycle:
      return "inconsistent_cycle";
  }
  return "?";
}

std::string SymmetryReport::to_json() const {
  nlohmann::json j;
  j["sign"] = to_string(sign);
  j["residual"] = residual;
  if (gamma) {
    nlohmann::json g = nlohmann::json::array();
    for (std::size_t i = 0; i < gamma->size(); ++i) {
      g.push_back({(*gamma)[i].real(), (*gamma)[i].imag()});
    }
    j["gamma"] = std::move(g);
  } else {
    j["gamma"] = nullptr;
  }
  if (witness) {
    j["witness"] = {{"kind", to_string(witness->kind)},
                    {"indices", witness->indices}};
  } else {
    j["witness"] = nullptr;
  }
  j["zero_tol"] = zero_tol;
  j["tol"] = tol;
  return j.dump(2);
}

SymmetryReport check_kernel_condition(const Kernel& k,
                                      const GridFunction& gamma,
                                      KernelSign sign, double tol) {
  if (k.measure().get() != gamma.measure().get()) {
    throw std::invalid_argument(
        "check_kernel_condition: gamma lives on a different measure");
  }
  if (!gamma.nonvanishing()) {
    throw std::invalid_argument(
        "check_kernel_condition: gamma must be nonvanishing");
  }
  const double s = sign == KernelSign::antisymmetric ? 1.0 : -1.0;
  const std::size_t m = k.dim();
  const double scale = std::max(1.0, k.max_abs());
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      // condition at (z = x_i, xi = x_j): gamma_i k(i,j) = -/+ gamma_j k(j,i)
      const double defect =
          std::abs(gamma[i] * k(i, j) + s * gamma[j] * k(j, i));
      worst = std::max(worst, defect);
    }
  }
  SymmetryReport report;
  report.sign = sign;
  report.residual = worst / scale;
  report.gamma = gamma;
  report.tol = tol;
  return report;
}

SymmetryReport find_gamma(const Kernel& k, KernelSign sign, double zero_tol,
                          double tol) {
  const std::size_t m = k.dim();
  const double scale = k.max_abs();
  const double cut = zero_tol * scale;
  const double ratio_sign = sign == KernelSign::antisymmetric ? -1.0 : 1.0;

  SymmetryReport report;
  report.sign = sign;
  report.zero_tol = zero_tol;
  report.tol = tol;

  auto fail = [&](Witness w) {
    report.witness = std::move(w);
    report.residual = 0.0;
    return report;
  };

  const auto nonzero = [&](std::size_t i, std::size_t j) {
    return std::abs(k(i, j)) > cut;
  };

  // zero-pattern symmetry and (antisymmetric case) vanishing diagonal
  for (std::size_t i = 0; i < m; ++i) {
    if (sign == KernelSign::antisymmetric && nonzero(i, i)) {
      return fail({Witness::Kind::diagonal, {i}});
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (nonzero(i, j) != nonzero(j, i)) {
        return fail({Witness::Kind::zero_pattern, {i, j}});
      }
    }
  }

  // ratio propagation over a spanning forest, atom-index traversal order
  Vector gamma = Vector::Zero(static_cast<Eigen::Index>(m));
  std::vector<bool> assigned(m, false);
  std::vector<std::ptrdiff_t> parent(m, -1);
  for (std::size_t root = 0; root < m; ++root) {
    if (assigned[root]) continue;
    gamma[static_cast<Eigen::Index>(root)] = 1.0;
    assigned[root] = true;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      const std::size_t j = queue.front();
      queue.pop_front();
      for (std::size_t i = 0; i < m; ++i) {
        if (i == j || assigned[i] || !nonzero(i, j)) continue;
        // gamma_i = -/+ gamma_j k(j,i)/k(i,j) = -/+ gamma_j k[j][i]... using
        // entry(i,j) = k(x_j, x_i): gamma_i k(i,j) = -/+ gamma_j k(j,i)
        gamma[static_cast<Eigen::Index>(i)] =
            ratio_sign * gamma[static_cast<Eigen::Index>(j)] * k(j, i) /
            k(i, j);
        assigned[i] = true;
        parent[i] = static_cast<std::ptrdiff_t>(j);
        queue.push_back(i);
      }
    }
  }

  // verify every edge; an inconsistent non-forest edge closes a cycle
  const double s = -ratio_sign;  // +1 antisymmetric, -1 symmetric
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (!nonzero(i, j)) continue;
      const double defect =
          std::abs(gamma[static_cast<Eigen::Index>(i)] * k(i, j) +
                   s * gamma[static_cast<Eigen::Index>(j)] * k(j, i));
      worst = std::max(worst, defect);
      if (defect > tol * std::max(scale, 1.0)) {
        // cycle: i -> ... -> lca <- ... <- j plus the closing edge (j, i)
        std::vector<std::size_t> up_i{i}, up_j{j};
        for (std::ptrdiff_t p = parent[i]; p >= 0;
             p = parent[static_cast<std::size_t>(p)]) {
          up_i.push_back(static_cast<std::size_t>(p));
        }
        for (std::ptrdiff_t p = parent[j]; p >= 0;
             p = parent[static_cast<std::size_t>(p)]) {
          up_j.push_back(static_cast<std::size_t>(p));
        }
        // trim the common tail above the lowest common ancestor so both
        // paths end exactly at the lca
        while (up_i.size() > 1 && up_j.size() > 1 &&
               up_i[up_i.size() - 1] == up_j[up_j.size() - 1] &&
               up_i[up_i.size() - 2] == up_j[up_j.size() - 2]) {
          up_i.pop_back();
          up_j.pop_back();
        }
        // cycle: i -> ... -> lca -> ... -> j, closed by the edge (j, i)
        std::vector<std::size_t> cycle(up_i.begin(), up_i.end());
        for (auto it = up_j.rbegin() + 1; it < up_j.rend(); ++it) {
          cycle.push_back(*it);
        }
        return fail({Witness::Kind::inconsistent_cycle, std::move(cycle)});
      }
    }
  }

  report.gamma = GridFunction(k.measure(), std::move(gamma));
  report.residual = worst / std::max(1.0, scale);
  return report;
}

IdentificationResult solve_identification(const Kernel& k, double diag_tol,
                                          double cond_flag) {
  const auto& mu = *k.measure();
  const std::size_t m = k.dim();
  const double scale = k.max_abs();
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(k(i, i)) > diag_tol * std::max(scale, 1e-300)) {
      throw std::invalid_argument(
          "solve_identification: kernel diagonal does not vanish (no "
          "solution: commutator kernels vanish on the diagonal)");
    }
  }
  Matrix x(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  double min_sep = 2.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0.0;
        continue;
      }
      // entry(i,j) = k(xi = x_j, z = x_i); commutator kernel of x is
      // x(xi,z)(xi - z), so divide by (lambda_j - lambda_i)
      const Complex sep = mu.point(j) - mu.point(i);
      min_sep = std::min(min_sep, std::abs(sep));
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          k(i, j) / sep;
    }
  }
  const double cond = m > 1 ? scale / min_sep : 0.0;
  return {Kernel(k.measure(), std::move(x)), cond, cond > cond_flag};
}

RankTwoCommutator make_rank_two(const GridFunction& u1, const GridFunction& v1,
                                const GridFunction& u2,
                                const GridFunction& v2) {
  const MeasurePtr mu = u1.measure();
  if (v1.measure().get() != mu.get() || u2.measure().get() != mu.get() ||
      v2.measure().get() != mu.get()) {
    throw std::invalid_argument("make_rank_two: mixed measures");
  }
  if (!v1.nonvanishing() || !v2.nonvanishing()) {
    throw std::invalid_argument("make_rank_two: vanishing denominators");
  }
  if (!u1.nonvanishing()) {
    throw std::invalid_argument(
        "make_rank_two: u1 must be nonvanishing (gamma = u1/v2)");
  }
  const std::size_t m = mu->size();
  double prod_scale = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    prod_scale = std::max(prod_scale, std::abs(u1[j] * v1[j]));
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(u1[j] * v1[j] - u2[j] * v2[j]) >
        1e-12 * std::max(1.0, prod_scale)) {
      throw std::invalid_argument(
          "make_rank_two: solvability condition u1 v1 = u2 v2 violated");
    }
  }
  Matrix kv(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      // entry(i,j) = k(xi = x_j, z = x_i) = u1(x_j)v1(x_i) - u2(x_j)v2(x_i)
      kv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          u1[j] * v1[i] - u2[j] * v2[i];
    }
  }
  return {Kernel(mu, std::move(kv)), u1.pointwise_quotient(v2)};
}

Kernel counterexample_kernel(MeasurePtr mu) {
  return Kernel::from_function(std::move(mu), [](Complex xi, Complex z) {
    return Complex(1.0 - (std::conj(xi) * z).real(), 0.0);
  });
}

CounterexampleSplit split_counterexample(MeasurePtr mu) {
  // K = (.,1)1 - ((., conj(z)) conj(z) + (., z) z)/2 splits along
  // X = ((., z)1 - (., 1) conj(z))/2 into two rank-two pieces.
  GridFunction half = GridFunction::constant(mu, 0.5);
  GridFunction one = GridFunction::constant(mu, 1.0);
  GridFunction z = GridFunction::monomial(mu, 1);
  GridFunction zbar = GridFunction::monomial(mu, -1);
  GridFunction half_zbar = half.pointwise_product(zbar);
  GridFunction half_z = half.pointwise_product(z);
  // (1 - conj(xi) z)/2 = u1 v1 - u2 v2 with u1 = 1/2, v1 = 1, u2 = conj(xi)/2,
  // v2 = z; gamma = conj(z)/2
  RankTwoCommutator first = make_rank_two(half, one, half_zbar, z);
  // (1 - xi conj(z))/2: u1 = 1/2, v1 = 1, u2 = xi/2, v2 = conj(z); gamma = z/2
  RankTwoCommutator second = make_rank_two(half, one, half_z, zbar);
  return {std::move(first), std::move(second)};
}

}  // namespace waveops
