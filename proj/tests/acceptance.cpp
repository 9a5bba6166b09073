// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = number of
// failures.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "phase.hpp"
#include "rng.hpp"
#include "verify_suite.hpp"
#include "wave.hpp"
#include "waveops/waveops.h"

using namespace waveops;

namespace {

int g_failures = 0;

void report(int id, const char* label, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", id,
              label, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

struct MeasureCase {
  std::string name;
  MeasurePtr mu;
};

std::vector<MeasureCase> lemma_measures() {
  return {
      {"uniform16", make_uniform(16)},
      {"cantor4", make_cantor(4)},
      {"cantor6", make_cantor(6)},
      {"riesz_demo", make_riesz({0.5, 0.4, 0.3, 0.2}, {4, 12, 36, 108}, 256)},
      {"random64", make_random(64, 20250801ull)},
  };
}

const std::vector<std::int64_t> kLemmaN = {0, 1, 2, 7, 25, 64};

// ---- criteria 1-3: lemma identities and eta symmetries ---------------------

void criteria_lemmas() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_rel[2] = {0.0, 0.0};  // [difference, sum] residual / scale
  double worst_eta_pair = 0.0;
  double worst_eta_window = 0.0;
  std::string worst_case[2];

  for (int sign_case = 0; sign_case < 2; ++sign_case) {
    const KernelSign sign = sign_case == 0 ? KernelSign::antisymmetric
                                           : KernelSign::symmetric;
    const SymmetryClass cls = sign_case == 0 ? SymmetryClass::antisymmetric
                                             : SymmetryClass::symmetric;
    for (const MeasureCase& mc : lemma_measures()) {
      const OperatorMatrix u = multiplication_unitary(mc.mu);
      const GridFunction one = GridFunction::constant(mc.mu, 1.0);
      for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const Kernel k =
            random_kernel(mc.mu, cls, 1000 * (sign_case + 1) + rep);
        const OperatorMatrix x = integral_operator(solve_identification(k).x);
        const IdentityGridSummary s =
            identity_grid(x, u, one, one, sign, -4, 4, -4, 4, kLemmaN);
        const double rel =
            s.max_lemma_residual / std::max(s.lemma_scale, 1e-300);
        if (rel > worst_rel[sign_case]) {
          worst_rel[sign_case] = rel;
          worst_case[sign_case] =
              fmt("%s rep=%llu k=%lld l=%lld n=%lld", mc.name.c_str(),
                  static_cast<unsigned long long>(rep),
                  static_cast<long long>(s.worst_k),
                  static_cast<long long>(s.worst_l),
                  static_cast<long long>(s.worst_n));
        }
        worst_eta_pair = std::max(worst_eta_pair, s.max_eta_pair_defect);
        worst_eta_window = std::max(worst_eta_window, s.max_eta_window_defect);
      }
    }
  }

  const double elapsed = seconds_since(t0);
  report(1, "difference-identity residuals <= 1e-10 * ||X|| ||e||^2",
         worst_rel[0] <= 1e-10 && elapsed <= 60.0,
         fmt("worst %.3e at %s; 5 measures x 10 kernels x 81 (k,l) x 6 n in "
             "%.1fs",
             worst_rel[0], worst_case[0].c_str(), elapsed));
  report(2, "sum-identity residuals (with boundary term) <= 1e-10 * scale",
         worst_rel[1] <= 1e-10,
         fmt("worst %.3e at %s", worst_rel[1], worst_case[1].c_str()));
  report(3, "eta pair symmetries and window cancellation <= 1e-12 relative",
         worst_eta_pair <= 1e-12 && worst_eta_window <= 1e-12,
         fmt("pair %.3e, window %.3e", worst_eta_pair, worst_eta_window));
}

// ---- criterion 4: scalar Cesaro closed form --------------------------------

void criterion_cesaro() {
  Rng rng(42ull);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double turns = rng.uniform(0.01, 0.99);
    const std::size_t n_terms = 1 + static_cast<std::size_t>(rng.bits() % 10000);
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
  report(4, "cesaro(w^n, N) matches (1/N)(1-w^N)/(1-w) to 1e-14",
         worst <= 1e-14, fmt("worst |diff| %.3e over 100 random w, N <= 1e4",
                             worst));
}

// ---- criterion 5: rank-two construction ------------------------------------

void criterion_rank_two() {
  double worst_condition = 0.0;
  double worst_commutator = 0.0;

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ExperimentSpec spec = parse_experiment_spec_text(
        "measure.kind = cantor\nmeasure.level = 5\n"
        "operator.kind = rank_two\noperator.seed = " +
        std::to_string(3000 + seed) + "\nn_grid = 2,4\n");
    const BuiltExperiment built = build_experiment(spec);
    const OperatorMatrix u = multiplication_unitary(built.mu);
    const SymmetryReport cond = check_kernel_condition(
        built.kernel, built.gamma, KernelSign::antisymmetric, 1e-12);
    worst_condition = std::max(worst_condition, cond.residual);
    const double resid =
        (built.x * u - u * built.x - integral_operator(built.kernel))
            .frobenius_norm();
    worst_commutator =
        std::max(worst_commutator, resid / std::max(built.cond, 1.0));
  }
  report(5,
         "rank-two kernels pass (gamma = u1/v2) at 1e-12; X U - U X = K "
         "within 1e-10 * cond",
         worst_condition <= 1e-12 && worst_commutator <= 1e-10,
         fmt("worst condition residual %.3e, worst commutator %.3e * cond",
             worst_condition, worst_commutator));
}

// ---- criterion 6: counterexample suite --------------------------------------

void criterion_counterexample() {
  bool pass = true;
  std::string detail;
  for (const MeasureCase& mc :
       {MeasureCase{"uniform8", make_uniform(8)},
        MeasureCase{"cantor4", make_cantor(4)}}) {
    const Kernel full = counterexample_kernel(mc.mu);
    const SymmetryReport whole = find_gamma(full, KernelSign::antisymmetric);
    const bool witnessed = whole.witness.has_value();

    const CounterexampleSplit split = split_counterexample(mc.mu);
    const double r1 = check_kernel_condition(split.first.kernel,
                                             split.first.gamma,
                                             KernelSign::antisymmetric)
                          .residual;
    const double r2 = check_kernel_condition(split.second.kernel,
                                             split.second.gamma,
                                             KernelSign::antisymmetric)
                          .residual;
    double gamma_gap = 0.0, split_defect = 0.0;
    for (std::size_t j = 0; j < mc.mu->size(); ++j) {
      gamma_gap = std::max(gamma_gap, std::abs(split.first.gamma[j] -
                                               split.second.gamma[j]));
    }
    split_defect = (split.first.kernel.values() +
                    split.second.kernel.values() - full.values())
                       .cwiseAbs()
                       .maxCoeff();

    const Kernel x_paper =
        Kernel::from_function(mc.mu, [](Complex xi, Complex z) {
          return 0.5 * (std::conj(xi) - std::conj(z));
        });
    const OperatorMatrix x = integral_operator(x_paper);
    const OperatorMatrix u = multiplication_unitary(mc.mu);
    const double commutator_resid =
        (x * u - u * x - integral_operator(full)).max_abs_entry();

    const bool ok = witnessed && r1 <= 1e-12 && r2 <= 1e-12 &&
                    gamma_gap > 0.1 && split_defect <= 1e-12 &&
                    commutator_resid <= 1e-10;
    pass = pass && ok;
    detail += fmt("%s[witness=%s parts %.1e/%.1e gammas %.2f X-resid %.1e] ",
                  mc.name.c_str(),
                  witnessed ? to_string(whole.witness->kind) : "NONE", r1, r2,
                  gamma_gap, commutator_resid);
  }
  report(6, "counterexample kernel fails; split passes with distinct gammas",
         pass, detail);
}

// ---- criterion 7: proposition forward + Y construction ----------------------

void criterion_proposition() {
  const MeasurePtr mu = make_cantor(5);
  const OperatorMatrix u = multiplication_unitary(mu);
  const GridFunction one = GridFunction::constant(mu, 1.0);
  const Conjugation c = Conjugation::canonical(mu);

  double worst_forward = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(4000 + seed);
    Matrix raw(32, 32);
    for (Eigen::Index i = 0; i < 32; ++i) {
      for (Eigen::Index j = 0; j < 32; ++j) raw(i, j) = rng.complex_normal();
    }
    const OperatorMatrix x0(mu, std::move(raw));
    const OperatorMatrix x(
        mu, (x0.entries() + c_transform(c, x0).entries()) / 2.0);
    worst_forward = std::max(worst_forward,
                             check_proposition_forward(x, u, one) /
                                 std::max(x.operator_norm(), 1e-300));
  }

  // Y construction bounds and the O(1/N) slope on 5 instances
  const std::vector<std::int64_t> n_grid = {50, 100, 200, 400, 800, 1600};
  double worst_d1_rel = 0.0, worst_d2_rel = 0.0;
  double slope_min = 0.0, slope_max = -2.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(5000 + seed);
    Matrix raw(32, 32);
    for (Eigen::Index i = 0; i < 32; ++i) {
      for (Eigen::Index j = 0; j < 32; ++j) raw(i, j) = rng.complex_normal();
    }
    const OperatorMatrix x0(mu, std::move(raw));
    const OperatorMatrix x(
        mu, (x0.entries() + c_transform(c, x0).entries()) / 2.0);
    const double x_norm = x.operator_norm();
    std::vector<double> xs, ys;
    for (std::int64_t n_terms : n_grid) {
      const YConstruction y = construct_Y(x, u, one, n_terms);
      worst_d1_rel = std::max(
          worst_d1_rel,
          y.commutator_defect / (4.0 * x_norm / static_cast<double>(n_terms)));
      worst_d2_rel = std::max(worst_d2_rel, y.symmetry_defect / x_norm);
      xs.push_back(std::log10(static_cast<double>(n_terms)));
      ys.push_back(std::log10(y.commutator_defect));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double n = static_cast<double>(xs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (seed == 0) {
      slope_min = slope_max = slope;
    } else {
      slope_min = std::min(slope_min, slope);
      slope_max = std::max(slope_max, slope);
    }
  }

  const bool pass = worst_forward <= 1e-10 && worst_d1_rel <= 1.0 &&
                    worst_d2_rel <= 1e-10 && slope_min >= -1.15 &&
                    slope_max <= -0.85;
  report(7,
         "forward implication <= 1e-10 ||X||; Y: d1 <= 4||X||/N, slope -1 "
         "+/- 0.15, d2 <= 1e-10 ||X||",
         pass,
         fmt("forward %.3e, d1/(4||X||/N) %.3f, d2 %.3e, slopes [%.3f, %.3f]",
             worst_forward, worst_d1_rel, worst_d2_rel, slope_min, slope_max));
}

// ---- criterion 8: Wiener averaging ------------------------------------------

void criterion_wiener() {
  const MeasurePtr cantor = make_cantor(6);
  const double limit = std::ldexp(1.0, -6);
  const double got = wiener_average(*cantor, 100000);
  const double cantor_err = std::abs(got - limit);

  const MeasurePtr uniform = make_uniform(16);
  double uniform_worst = 0.0;
  for (std::int64_t n_terms = 1; n_terms < 16; ++n_terms) {
    uniform_worst = std::max(uniform_worst, wiener_average(*uniform, n_terms));
  }
  report(8, "wiener averages: cantor L=6 -> 2^-6 within 5e-3; uniform 0",
         cantor_err <= 5e-3 && uniform_worst <= 1e-24,
         fmt("cantor |err| %.3e (N=1e5), uniform max %.3e for N < m",
             cantor_err, uniform_worst));
}

// ---- criteria 9-10: convergence experiment + determinism --------------------

std::string converge_spec_text() {
  return "measure.kind = cantor\n"
         "measure.level = 7\n"
         "operator.kind = rank_two\n"
         "operator.style = monomial\n"
         "operator.p1 = 2\n"
         "operator.p2 = -1\n"
         "operator.q = 0\n"
         "vectors.k_min = -4\n"
         "vectors.k_max = 4\n"
         "n_grid = 16,32,64,128,256,512,1024,2048,4096\n";
}

void criterion_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentSpec spec = parse_experiment_spec_text(converge_spec_text());
  const BuiltExperiment built = build_experiment(spec);
  const auto pairs = build_vector_family(spec.vectors, built);
  const ConvergenceReport rep = run_experiment(built, pairs, spec.n_grid);

  const std::int64_t n_end =
      std::min<std::int64_t>(4096, rep.horizon);
  std::size_t i16 = 0, iend = 0;
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    if (rep.grid[i] == 16) i16 = i;
    if (rep.grid[i] <= n_end) iend = i;
  }

  double diff_start = 0.0, diff_end = 0.0;
  for (const Trace& t : rep.traces) {
    diff_start = std::max(diff_start, std::abs(t.cesaro_diff[i16]));
    diff_end = std::max(diff_end, std::abs(t.cesaro_diff[iend]));
  }
  const double decay = diff_start / std::max(diff_end, 1e-300);

  // Cauchy tail: successive differences with right endpoint in the last
  // octave (N_end/2, N_end], against the sum traces' overall scale
  double scale = 0.0, tail = 0.0;
  for (const Trace& t : rep.traces) {
    for (std::size_t i = 0; i <= iend; ++i) {
      scale = std::max(scale, std::abs(t.cesaro_sum[i]));
    }
  }
  for (const Trace& t : rep.traces) {
    for (std::size_t i = 1; i <= iend; ++i) {
      if (2 * rep.grid[i] <= n_end) continue;
      tail = std::max(tail,
                      std::abs(t.cesaro_sum[i] - t.cesaro_sum[i - 1]));
    }
  }
  const double elapsed = seconds_since(t0);
  const bool pass = decay >= 10.0 && tail <= 1e-2 * scale && elapsed <= 300.0;
  report(9,
         "rank-two on cantor L=7: diff traces decay >= 10x, sum traces pass "
         "the Cauchy tail",
         pass,
         fmt("decay %.1fx (N=16 -> %lld), tail %.4f%% of scale %.3g, %.1fs",
             decay, static_cast<long long>(rep.grid[iend]),
             100.0 * tail / scale, scale, elapsed));
}

void criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "waveops_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path spec = dir / "exp.spec";
  {
    std::ofstream out(spec);
    out << converge_spec_text();
  }
  const fs::path out1 = dir / "run1", out2 = dir / "run2";
  const waveops_status s1 = waveops_run_converge(
      spec.string().c_str(), out1.string().c_str(), 0, 0);
  const waveops_status s2 = waveops_run_converge(
      spec.string().c_str(), out2.string().c_str(), 0, 0);

  bool identical = s1 == WAVEOPS_OK && s2 == WAVEOPS_OK;
  std::size_t files = 0;
  if (identical) {
    const auto read = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    for (const auto& entry : fs::directory_iterator(out1)) {
      ++files;
      if (!fs::exists(out2 / entry.path().filename()) ||
          read(entry.path()) != read(out2 / entry.path().filename())) {
        identical = false;
        break;
      }
    }
    identical = identical && files == 81 + 1;
  }
  report(10, "cmd_converge byte-identical across reruns (same spec + seed)",
         identical, fmt("%zu files compared", files));
  fs::remove_all(dir);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  std::printf("waveops acceptance suite\n");
  criteria_lemmas();
  criterion_cesaro();
  criterion_rank_two();
  criterion_counterexample();
  criterion_proposition();
  criterion_wiener();
  criterion_convergence();
  criterion_determinism();
  std::printf("%d criterion(s) failed; total %.1fs\n", g_failures,
              seconds_since(t0));
  return g_failures;
}
