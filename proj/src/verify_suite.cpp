#include "verify_suite.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "phase.hpp"
#include "rng.hpp"

namespace waveops {

bool VerifyReport::all_pass() const {
  for (const CheckResult& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::size_t VerifyReport::failures() const {
  std::size_t n = 0;
  for (const CheckResult& c : checks) {
    if (!c.pass) ++n;
  }
  return n;
}

std::string VerifyReport::to_json() const {
  nlohmann::json j;
  nlohmann::json arr = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    arr.push_back({{"name", c.name},
                   {"residual", c.residual},
                   {"bound", c.bound},
                   {"pass", c.pass},
                   {"detail", c.detail}});
  }
  j["checks"] = std::move(arr);
  j["failures"] = failures();
  j["passed"] = all_pass();
  return j.dump(2) + "\n";
}

void VerifyReport::print(std::ostream& out) const {
  for (const CheckResult& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual="
        << c.residual << "  bound=" << c.bound;
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
  }
  out << (all_pass() ? "verify: all checks passed"
                     : "verify: " + std::to_string(failures()) +
                           " check(s) FAILED")
      << "\n";
}

namespace {

CheckResult check(std::string name, double residual, double bound,
                  std::string detail = {}) {
  return {std::move(name), residual, bound, residual <= bound,
          std::move(detail)};
}

const std::vector<std::int64_t> kLemmaN = {0, 1, 2, 7, 25, 64};

// ---- paper examples --------------------------------------------------------

void check_scalar_cesaro(VerifyReport& report) {
  // mean of 1, i, i^2 is i/3
  {
    std::vector<Complex> seq;
    for (int n = 0; n < 8; ++n) seq.push_back(unit_power(0.25, n));
    const Complex mean = cesaro(seq, 3);
    report.checks.push_back(check("cesaro.quarter_turn",
                                  std::abs(mean - Complex(0.0, 1.0 / 3.0)),
                                  1e-15));
  }
  // against the closed form (1/N)(1 - w^N)/(1 - w)
  Rng rng(20250ull);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double turns = rng.uniform(0.01, 0.99);
    const std::size_t n_terms = 1 + static_cast<std::size_t>(rng.bits() % 999);
    std::vector<Complex> seq;
    seq.reserve(n_terms);
    for (std::size_t n = 0; n < n_terms; ++n) {
      seq.push_back(unit_power(turns, static_cast<std::int64_t>(n)));
    }
    const Complex w = circle_exp(turns);
    const Complex closed =
        (1.0 - unit_power(turns, static_cast<std::int64_t>(n_terms))) /
        (static_cast<double>(n_terms) * (1.0 - w));
    worst = std::max(worst, std::abs(cesaro(seq, n_terms) - closed));
  }
  report.checks.push_back(check("cesaro.closed_form_random", worst, 1e-14));
}

void check_rank_two_example(VerifyReport& report, double tol) {
  MeasurePtr mu = make_cantor(4);
  const GridFunction u1 = GridFunction::monomial(mu, 2);
  const GridFunction u2 = GridFunction::monomial(mu, -1);
  const GridFunction v1 = GridFunction::monomial(mu, -2);
  const GridFunction v2 = GridFunction::monomial(mu, 1);
  const RankTwoCommutator rt = make_rank_two(u1, v1, u2, v2);

  const SymmetryReport cond = check_kernel_condition(
      rt.kernel, rt.gamma, KernelSign::antisymmetric, 1e-12);
  report.checks.push_back(
      check("rank_two.condition_residual", cond.residual, 1e-12));

  // recovered gamma is proportional to u1/v2 on each component
  const SymmetryReport found = find_gamma(rt.kernel, KernelSign::antisymmetric);
  double gamma_dev = 1.0;
  if (found.gamma) {
    const Complex ratio0 = (*found.gamma)[0] / rt.gamma[0];
    double dev = 0.0;
    for (std::size_t j = 0; j < mu->size(); ++j) {
      dev = std::max(dev,
                     std::abs((*found.gamma)[j] - ratio0 * rt.gamma[j]));
    }
    gamma_dev = dev;
  }
  report.checks.push_back(check("rank_two.find_gamma_matches", gamma_dev,
                                1e-10, "up to a per-component constant"));

  const IdentificationResult ident = solve_identification(rt.kernel);
  const OperatorMatrix x = integral_operator(ident.x);
  const OperatorMatrix u = multiplication_unitary(mu);
  const OperatorMatrix k_op = integral_operator(rt.kernel);
  const double commutator_residual =
      (x * u - u * x - k_op).frobenius_norm();
  report.checks.push_back(check("rank_two.commutator_solve",
                                commutator_residual,
                                tol * std::max(ident.cond, 1.0)));
}

void check_counterexample(VerifyReport& report, double tol) {
  MeasurePtr mu = make_uniform(8);
  const Kernel full = counterexample_kernel(mu);
  const CounterexampleSplit split = split_counterexample(mu);

  report.checks.push_back(check(
      "counterexample.split_sums_to_full",
      (split.first.kernel.values() + split.second.kernel.values() -
       full.values())
          .cwiseAbs()
          .maxCoeff(),
      1e-12));

  const SymmetryReport part1 = check_kernel_condition(
      split.first.kernel, split.first.gamma, KernelSign::antisymmetric, 1e-12);
  const SymmetryReport part2 =
      check_kernel_condition(split.second.kernel, split.second.gamma,
                             KernelSign::antisymmetric, 1e-12);
  report.checks.push_back(check("counterexample.parts_pass",
                                std::max(part1.residual, part2.residual),
                                1e-12));

  double gamma_gap = 0.0;
  for (std::size_t j = 0; j < mu->size(); ++j) {
    gamma_gap = std::max(gamma_gap, std::abs(split.first.gamma[j] -
                                             split.second.gamma[j]));
  }
  report.checks.push_back(
      {std::string("counterexample.distinct_gammas"), gamma_gap, 0.1,
       gamma_gap > 0.1, "gammas must differ as functions"});

  const SymmetryReport whole = find_gamma(full, KernelSign::antisymmetric);
  report.checks.push_back({std::string("counterexample.full_fails"),
                           whole.witness ? 1.0 : 0.0, 0.0,
                           whole.witness.has_value(),
                           whole.witness
                               ? std::string("witness: ") +
                                     to_string(whole.witness->kind)
                               : std::string("no witness found")});

  // X = ((., z)1 - (., 1) conj(z))/2 has kernel (conj(xi) - conj(z))/2
  const Kernel x_paper = Kernel::from_function(mu, [](Complex xi, Complex z) {
    return 0.5 * (std::conj(xi) - std::conj(z));
  });
  const OperatorMatrix x_op = integral_operator(x_paper);
  const OperatorMatrix u = multiplication_unitary(mu);
  const OperatorMatrix k_op = integral_operator(full);
  report.checks.push_back(check("counterexample.x_formula_commutator",
                                (x_op * u - u * x_op - k_op).frobenius_norm(),
                                tol));

  const IdentificationResult solved = solve_identification(full);
  report.checks.push_back(check(
      "counterexample.solve_matches_formula",
      (solved.x.values() - x_paper.values()).cwiseAbs().maxCoeff(), 1e-12));
}

// ---- randomized identities -------------------------------------------------

struct Instance {
  std::string label;
  MeasurePtr mu;
  Kernel kernel;
  OperatorMatrix x;
  OperatorMatrix u;
  double cond;
};

Instance make_instance(const std::string& label, MeasurePtr mu,
                       SymmetryClass symmetry, std::uint64_t seed) {
  Kernel k = random_kernel(mu, symmetry, seed);
  IdentificationResult ident = solve_identification(k);
  OperatorMatrix x = integral_operator(ident.x);
  OperatorMatrix u = multiplication_unitary(mu);
  return {label, std::move(mu), std::move(k), std::move(x), std::move(u),
          ident.cond};
}

void check_identity_instance(VerifyReport& report, const Instance& inst,
                             KernelSign sign, double tol) {
  const GridFunction one = GridFunction::constant(inst.mu, 1.0);
  const IdentityGridSummary summary =
      identity_grid(inst.x, inst.u, one, one, sign, -3, 3, -3, 3, kLemmaN);
  const std::string prefix =
      std::string(sign == KernelSign::antisymmetric ? "difference"
                                                    : "sum") +
      "_lemma." + inst.label;
  report.checks.push_back(check(prefix + ".residual",
                                summary.max_lemma_residual,
                                tol * std::max(summary.lemma_scale, 1e-300)));
  report.checks.push_back(
      check(prefix + ".eta_pair_symmetry", summary.max_eta_pair_defect, 1e-12));
  if (sign == KernelSign::antisymmetric) {
    report.checks.push_back(check(prefix + ".eta_window_cancellation",
                                  summary.max_eta_window_defect, 1e-12));
  }
}

void check_telescoping_instance(VerifyReport& report, const Instance& inst,
                                double tol) {
  const double x_norm = inst.x.operator_norm();
  double worst = 0.0;
  for (const auto& [p, q] : std::vector<std::pair<std::int64_t, std::int64_t>>{
           {0, 0}, {0, 1}, {-8, 11}, {5, -7}, {-64, 64}}) {
    worst = std::max(worst, verify_telescoping(inst.x, inst.u, p, q));
  }
  report.checks.push_back(check("telescoping." + inst.label, worst,
                                tol * std::max(x_norm, 1e-300)));
}

void check_y_and_proposition(VerifyReport& report, const Instance& inst,
                             double tol) {
  // C-symmetrize: X <- (X + C X* C)/2, then K = XU - UX obeys C K* C = -K
  const Conjugation c = Conjugation::canonical(inst.mu);
  const GridFunction one = GridFunction::constant(inst.mu, 1.0);
  const Matrix sym =
      (inst.x.entries() + c_transform(c, inst.x).entries()) / 2.0;
  const OperatorMatrix x_sym(inst.mu, sym, "Xsym");
  const double x_norm = x_sym.operator_norm();

  const double forward = check_proposition_forward(x_sym, inst.u, one);
  report.checks.push_back(check("proposition_forward." + inst.label, forward,
                                tol * std::max(x_norm, 1e-300)));

  double worst_d1_rel = 0.0;
  double worst_d2 = 0.0;
  for (std::int64_t n_terms : {50, 200}) {
    const YConstruction y = construct_Y(x_sym, inst.u, one, n_terms);
    worst_d1_rel = std::max(
        worst_d1_rel, y.commutator_defect /
                          (4.0 * std::max(x_norm, 1e-300) /
                           static_cast<double>(n_terms)));
    worst_d2 = std::max(worst_d2, y.symmetry_defect);
  }
  report.checks.push_back(
      check("y_construction.commutator_bound." + inst.label, worst_d1_rel,
            1.0, "d1 / (4||X||/N)"));
  report.checks.push_back(check("y_construction.c_symmetry." + inst.label,
                                worst_d2, tol * std::max(x_norm, 1e-300)));
}

void check_symmetry_equivalence(VerifyReport& report) {
  // kernel antisymmetry <=> operator C-antisymmetry under the canonical C
  MeasurePtr mu = make_random(24, 91ull);
  const Conjugation c = Conjugation::canonical(mu);
  double worst_anti = 0.0, worst_sym = 0.0;
  bool asym_detected = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Kernel ka = random_kernel(mu, SymmetryClass::antisymmetric, 500 + seed);
    const OperatorMatrix a = integral_operator(ka);
    worst_anti = std::max(
        worst_anti, c_symmetry_defect(c, a, -1) /
                        std::max(a.frobenius_norm(), 1e-300));
    const Kernel ks = random_kernel(mu, SymmetryClass::symmetric, 700 + seed);
    const OperatorMatrix s = integral_operator(ks);
    worst_sym = std::max(worst_sym,
                         c_symmetry_defect(c, s, +1) /
                             std::max(s.frobenius_norm(), 1e-300));
    const Kernel kn = random_kernel(mu, SymmetryClass::none, 900 + seed);
    const OperatorMatrix n = integral_operator(kn);
    if (c_symmetry_defect(c, n, -1) <=
            1e-10 * std::max(n.frobenius_norm(), 1e-300) ||
        check_kernel_condition(kn, c.gamma(), KernelSign::antisymmetric)
            .passed()) {
      asym_detected = false;  // generic kernels must fail both routes
    }
  }
  report.checks.push_back(
      check("equivalence.antisymmetric_kernel_vs_operator", worst_anti, 1e-10));
  report.checks.push_back(
      check("equivalence.symmetric_kernel_vs_operator", worst_sym, 1e-10));
  report.checks.push_back({std::string("equivalence.generic_fails_both"),
                           asym_detected ? 0.0 : 1.0, 0.0, asym_detected,
                           "both routes reject generic kernels"});
}

VerifyReport builtin_paper_examples(double tol) {
  VerifyReport report;
  check_scalar_cesaro(report);
  check_rank_two_example(report, tol);
  check_counterexample(report, tol);
  return report;
}

VerifyReport builtin_identities(double tol) {
  VerifyReport report;
  const std::vector<std::pair<std::string, MeasurePtr>> measures = {
      {"uniform16", make_uniform(16)},
      {"cantor5", make_cantor(5)},
      {"random32", make_random(32, 7ull)},
  };
  for (const auto& [label, mu] : measures) {
    for (std::uint64_t rep = 0; rep < 2; ++rep) {
      const Instance anti = make_instance(
          label + ".anti" + std::to_string(rep), mu,
          SymmetryClass::antisymmetric, 1000 + rep);
      check_identity_instance(report, anti, KernelSign::antisymmetric, tol);
      check_telescoping_instance(report, anti, tol);
      const Instance sym =
          make_instance(label + ".sym" + std::to_string(rep), mu,
                        SymmetryClass::symmetric, 2000 + rep);
      check_identity_instance(report, sym, KernelSign::symmetric, tol);
    }
    const Instance generic =
        make_instance(label + ".gen", mu, SymmetryClass::none, 3000);
    check_y_and_proposition(report, generic, tol);
  }
  check_symmetry_equivalence(report);
  return report;
}

}  // namespace

VerifyReport verify_builtin(const std::string& name, double identity_tol) {
  const double tol = identity_tol > 0 ? identity_tol : 1e-10;
  if (name == "paper-examples") return builtin_paper_examples(tol);
  if (name == "identities") return builtin_identities(tol);
  throw SpecError("unknown builtin '" + name +
                  "' (available: paper-examples, identities)");
}

VerifyReport verify_spec(const ExperimentSpec& spec) {
  VerifyReport report;
  const double tol = spec.tol.identity;
  BuiltExperiment built = build_experiment(spec);
  const OperatorMatrix u = multiplication_unitary(built.mu);
  const OperatorMatrix k_op = integral_operator(built.kernel);
  const double x_norm = built.x.operator_norm();

  report.checks.push_back(check(
      "spec.commutator_solve",
      (built.x * u - u * built.x - k_op).frobenius_norm(),
      tol * std::max(built.cond, 1.0)));

  if (spec.op.symmetry != SymmetryClass::none) {
    const KernelSign sign = spec.op.symmetry == SymmetryClass::antisymmetric
                                ? KernelSign::antisymmetric
                                : KernelSign::symmetric;
    const SymmetryReport cond =
        check_kernel_condition(built.kernel, built.gamma, sign, tol);
    report.checks.push_back(
        {std::string("spec.kernel_condition_") + to_string(sign),
         cond.residual, tol, cond.passed(),
         cond.passed() ? ""
                       : std::string("declared symmetry class violated: "
                                     "gamma(z)k(xi,z) = ") +
                             (sign == KernelSign::antisymmetric ? "-" : "+") +
                             "gamma(xi)k(z,xi) fails"});

    if (cond.passed()) {
      // reduce to the canonical conjugation by bordering with gamma:
      // X' = gamma(U) X has commutator kernel gamma(z) k(xi, z), which
      // satisfies the plain (gamma = 1) condition
      const OperatorMatrix x_reduced = multiplication_by(built.gamma) * built.x;
      const GridFunction one = GridFunction::constant(built.mu, 1.0);
      const IdentityGridSummary summary = identity_grid(
          x_reduced, u, one, one, sign, std::max<std::int64_t>(spec.vectors.k_min, -8),
          std::min<std::int64_t>(spec.vectors.k_max, 8),
          std::max<std::int64_t>(spec.vectors.k_min, -8),
          std::min<std::int64_t>(spec.vectors.k_max, 8), kLemmaN);
      report.checks.push_back(
          check("spec.lemma_residual", summary.max_lemma_residual,
                tol * std::max(summary.lemma_scale, 1e-300)));
      report.checks.push_back(check("spec.eta_pair_symmetry",
                                    summary.max_eta_pair_defect, 1e-12));
      if (sign == KernelSign::antisymmetric) {
        report.checks.push_back(check("spec.eta_window_cancellation",
                                      summary.max_eta_window_defect, 1e-12));
      }
    }
  }

  double tele = 0.0;
  for (const auto& [p, q] : std::vector<std::pair<std::int64_t, std::int64_t>>{
           {0, 1}, {-8, 11}, {5, -7}}) {
    tele = std::max(tele, verify_telescoping(built.x, u, p, q));
  }
  report.checks.push_back(
      check("spec.telescoping", tele, tol * std::max(x_norm, 1e-300)));

  return report;
}

}  // namespace waveops
