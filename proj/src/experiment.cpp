#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "phase.hpp"
#include "rng.hpp"

namespace waveops {

namespace {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Smooth nonvanishing random function: 1 + 0.6 * normalized random
// trigonometric polynomial of degree 3, so |f| >= 0.4 everywhere and the
// divided differences entering the identification solve stay bounded
// (independent of the atom spacing). Per-atom i.i.d. values would make the
// solved X blow up like 1/min_gap, which is not the bounded-identification
// regime the averaging statements are about.
GridFunction random_nonvanishing(const MeasurePtr& mu, Rng& rng) {
  constexpr int degree = 3;
  std::complex<double> coeff[2 * degree];
  for (auto& c : coeff) c = rng.complex_normal();
  Vector v(static_cast<Eigen::Index>(mu->size()));
  double sup = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double theta = mu->theta(static_cast<std::size_t>(j));
    Complex g = 0.0;
    for (int t = 0; t < degree; ++t) {
      g += coeff[2 * t] * unit_power(theta, t + 1) +
           coeff[2 * t + 1] * unit_power(theta, -(t + 1));
    }
    v[j] = g;
    sup = std::max(sup, std::abs(g));
  }
  if (sup == 0.0) sup = 1.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    v[j] = 1.0 + 0.6 * v[j] / sup;
  }
  return GridFunction(mu, std::move(v));
}

}  // namespace

MeasurePtr build_measure(const MeasureSpec& spec) {
  switch (spec.kind) {
    case MeasureKind::uniform:
      return make_uniform(spec.m);
    case MeasureKind::cantor:
      return make_cantor(spec.level);
    case MeasureKind::riesz:
      return make_riesz(spec.coeffs, spec.freqs, spec.grid);
    case MeasureKind::file:
      return load_measure_file(spec.path);
  }
  throw std::logic_error("unreachable measure kind");
}

Kernel random_kernel(MeasurePtr mu, SymmetryClass symmetry,
                     std::uint64_t seed) {
  Rng rng(seed);
  const auto m = static_cast<Eigen::Index>(mu->size());
  Matrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      g(i, j) = rng.complex_normal();
    }
  }
  Matrix k(m, m);
  switch (symmetry) {
    case SymmetryClass::antisymmetric:
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
          k(i, j) = (g(i, j) - g(j, i)) / 2.0;
        }
      }
      break;
    case SymmetryClass::symmetric:
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
          k(i, j) = (g(i, j) + g(j, i)) / 2.0;
        }
      }
      break;
    case SymmetryClass::none:
      k = g;
      break;
  }
  // commutator kernels vanish on the diagonal
  for (Eigen::Index i = 0; i < m; ++i) k(i, i) = 0.0;
  return Kernel(std::move(mu), std::move(k));
}

BuiltExperiment build_experiment(const ExperimentSpec& spec) {
  MeasurePtr mu = build_measure(spec.measure);
  std::vector<std::pair<std::string, std::string>> inputs;
  if (spec.measure.kind == MeasureKind::file) {
    inputs.emplace_back(spec.measure.path,
                        fnv1a64_hex(read_file(spec.measure.path)));
  }

  std::optional<Kernel> kernel;
  std::optional<GridFunction> gamma;
  switch (spec.op.kind) {
    case OperatorKind::rank_two: {
      if (spec.op.style == RankTwoStyle::monomial) {
        // u1 v1 = u2 v2 = z^q built from exponents
        GridFunction u1 = GridFunction::monomial(mu, spec.op.p1);
        GridFunction u2 = GridFunction::monomial(mu, spec.op.p2);
        GridFunction v1 = GridFunction::monomial(mu, spec.op.q - spec.op.p1);
        GridFunction v2 = GridFunction::monomial(mu, spec.op.q - spec.op.p2);
        RankTwoCommutator rt = make_rank_two(u1, v1, u2, v2);
        kernel = std::move(rt.kernel);
        gamma = std::move(rt.gamma);
      } else {
        Rng rng(*spec.op.seed);
        GridFunction u1 = random_nonvanishing(mu, rng);
        GridFunction u2 = random_nonvanishing(mu, rng);
        GridFunction prod = random_nonvanishing(mu, rng);
        GridFunction v1 = prod.pointwise_quotient(u1);
        GridFunction v2 = prod.pointwise_quotient(u2);
        RankTwoCommutator rt = make_rank_two(u1, v1, u2, v2);
        kernel = std::move(rt.kernel);
        gamma = std::move(rt.gamma);
      }
      break;
    }
    case OperatorKind::counterexample:
      kernel = counterexample_kernel(mu);
      break;
    case OperatorKind::random_kernel:
      kernel = random_kernel(mu, spec.op.symmetry, *spec.op.seed);
      break;
    case OperatorKind::kernel_file: {
      inputs.emplace_back(spec.op.path, fnv1a64_hex(read_file(spec.op.path)));
      kernel = Kernel::load_file(mu, spec.op.path);
      break;
    }
  }

  IdentificationResult ident =
      solve_identification(*kernel, 1e-10, spec.tol.condition);
  OperatorMatrix x = integral_operator(ident.x);
  if (!gamma) gamma = GridFunction::constant(mu, 1.0);
  std::string fingerprint = mu->fingerprint();

  return BuiltExperiment{std::move(mu),          std::move(*kernel),
                         std::move(x),           std::move(*gamma),
                         ident.cond,             std::move(fingerprint),
                         std::move(inputs)};
}

std::vector<TestPair> build_vector_family(const VectorsSpec& vectors,
                                          const BuiltExperiment& built) {
  std::vector<TestPair> pairs;
  if (vectors.monomial) {
    const GridFunction e = GridFunction::constant(built.mu, 1.0);
    const Conjugation c(built.mu, built.gamma);
    const GridFunction ebar = conjugate(c, e);
    for (std::int64_t k = vectors.k_min; k <= vectors.k_max; ++k) {
      const GridFunction h1 =
          GridFunction::monomial(built.mu, k).pointwise_product(e);
      for (std::int64_t l = vectors.k_min; l <= vectors.k_max; ++l) {
        const GridFunction h2 =
            GridFunction::monomial(built.mu, l).pointwise_product(ebar);
        char name[64];
        std::snprintf(name, sizeof name, "k%+lld_l%+lld",
                      static_cast<long long>(k), static_cast<long long>(l));
        pairs.push_back({k, l, h1, h2, name});
      }
    }
    return pairs;
  }

  // explicit pair file: lines alternate h1 / h2, each line 2m reals
  std::ifstream in(vectors.path);
  if (!in) throw SpecError("cannot open vectors file: " + vectors.path);
  std::string line;
  std::vector<GridFunction> fns;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<Complex> vals;
    double re, im;
    while (ls >> re >> im) vals.emplace_back(re, im);
    if (vals.size() != built.mu->size()) {
      throw SpecError("vectors file: line has " + std::to_string(vals.size()) +
                      " values, expected " + std::to_string(built.mu->size()));
    }
    fns.push_back(GridFunction::from_values(built.mu, std::move(vals)));
  }
  if (fns.empty() || fns.size() % 2 != 0) {
    throw SpecError("vectors file: expected an even number of vector lines");
  }
  for (std::size_t i = 0; i + 1 < fns.size(); i += 2) {
    pairs.push_back({-1, -1, fns[i], fns[i + 1],
                     "pair" + std::to_string(i / 2)});
  }
  return pairs;
}

namespace {

// mean of the first N powers of omega: (1/N)(1 - omega^N)/(1 - omega),
// evaluated with exactly reduced phases; delta in turns
Complex geometric_mean(double delta_turns, std::int64_t n_terms) {
  const Complex omega = circle_exp(frac_mul(delta_turns, 1));
  if (omega == Complex(1.0, 0.0)) return 1.0;
  const Complex omega_n = circle_exp(frac_mul(delta_turns, n_terms));
  return (1.0 - omega_n) / (static_cast<double>(n_terms) * (1.0 - omega));
}

std::optional<DecayFit> fit_decay(const std::vector<std::int64_t>& grid,
                                  const std::vector<Complex>& values,
                                  std::int64_t horizon) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] > horizon) continue;
    const double a = std::abs(values[i]);
    if (a <= 0.0) continue;
    xs.push_back(std::log10(static_cast<double>(grid[i])));
    ys.push_back(std::log10(a));
  }
  if (xs.size() < 5) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  DecayFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.log10_prefactor = (sy - fit.exponent * sx) / n;
  fit.points = static_cast<int>(xs.size());
  return fit;
}

}  // namespace

ConvergenceReport run_experiment(const BuiltExperiment& built,
                                 const std::vector<TestPair>& pairs,
                                 const std::vector<std::int64_t>& n_grid) {
  if (n_grid.empty()) {
    throw SpecError("run_experiment: empty n_grid");
  }
  const auto& mu = *built.mu;
  const auto m = static_cast<Eigen::Index>(mu.size());
  const Matrix& x = built.x.entries();

  ConvergenceReport report;
  report.grid = n_grid;
  report.horizon = mu.effective_horizon();
  report.traces.reserve(pairs.size());

  for (const TestPair& pair : pairs) {
    const Vector v1 = pair.h1.ortho();
    const Vector v2 = pair.h2.ortho();
    Trace trace;
    trace.name = pair.name;
    trace.cesaro_diff.reserve(n_grid.size());
    trace.cesaro_sum.reserve(n_grid.size());
    trace.raw.reserve(n_grid.size());

    for (std::int64_t n_terms : n_grid) {
      // pairing(n) = sum_ij c_ij omega_ij^n with c_ij = X_ij v1_j conj(v2_i),
      // omega_ij = exp(2 pi i (theta_i - theta_j)); Cesaro means reduce to
      // geometric means of omega_ij, conjugate for the reversed direction.
      CompensatedComplexSum diff_sum, sum_sum, raw_sum;
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
          const Complex c = x(i, j) * v1[j] * std::conj(v2[i]);
          if (c == Complex(0.0, 0.0)) continue;
          const double delta = mu.theta(static_cast<std::size_t>(i)) -
                               mu.theta(static_cast<std::size_t>(j));
          if (i == j) {
            sum_sum.add(2.0 * c);
            continue;
          }
          const Complex gm = geometric_mean(delta, n_terms);
          const Complex wn = circle_exp(frac_mul(delta, n_terms));
          diff_sum.add(c * (gm - std::conj(gm)));
          sum_sum.add(c * (gm + std::conj(gm)));
          raw_sum.add(c * (wn - std::conj(wn)));
        }
      }
      trace.cesaro_diff.push_back(diff_sum.value());
      trace.cesaro_sum.push_back(sum_sum.value());
      trace.raw.push_back(raw_sum.value());
    }
    trace.fit = fit_decay(n_grid, trace.cesaro_diff, report.horizon);
    report.traces.push_back(std::move(trace));
  }
  return report;
}

void write_trace_csv(std::ostream& out, const ConvergenceReport& report,
                     const Trace& trace) {
  out << "N,cesaro_diff_re,cesaro_diff_im,cesaro_sum_re,cesaro_sum_im,"
         "raw_re,raw_im\n";
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    out << report.grid[i] << "," << format_g17(trace.cesaro_diff[i].real())
        << "," << format_g17(trace.cesaro_diff[i].imag()) << ","
        << format_g17(trace.cesaro_sum[i].real()) << ","
        << format_g17(trace.cesaro_sum[i].imag()) << ","
        << format_g17(trace.raw[i].real()) << ","
        << format_g17(trace.raw[i].imag()) << "\n";
  }
}

std::string report_manifest(const ExperimentSpec& spec,
                            const BuiltExperiment& built,
                            const ConvergenceReport& report) {
  nlohmann::json j;
  j["tool_version"] = "waveops 0.1.0";
  j["measure_hash"] = built.measure_fingerprint;
  j["measure_label"] = built.mu->label();
  j["spec_hash"] = fnv1a64_hex(spec.raw_text);
  j["spec"] = spec.raw_text;
  j["horizon"] = report.horizon;
  j["identification_cond"] = built.cond;
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& [path, hash] : built.inputs) {
    inputs.push_back({{"path", path}, {"hash", hash}});
  }
  j["inputs"] = std::move(inputs);
  nlohmann::json fits = nlohmann::json::object();
  for (const Trace& t : report.traces) {
    if (t.fit) {
      fits[t.name] = {{"exponent", t.fit->exponent},
                      {"log10_prefactor", t.fit->log10_prefactor},
                      {"points", t.fit->points}};
    } else {
      fits[t.name] = nullptr;
    }
  }
  j["fits"] = std::move(fits);
  return j.dump(2) + "\n";
}

void write_report_files(const std::string& out_dir,
                        const ExperimentSpec& spec,
                        const BuiltExperiment& built,
                        const ConvergenceReport& report) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (const Trace& trace : report.traces) {
    std::ofstream out(fs::path(out_dir) / ("trace_" + trace.name + ".csv"));
    if (!out) {
      throw std::runtime_error("cannot write trace CSV in " + out_dir);
    }
    write_trace_csv(out, report, trace);
  }
  std::ofstream mf(fs::path(out_dir) / "manifest.json");
  if (!mf) throw std::runtime_error("cannot write manifest in " + out_dir);
  mf << report_manifest(spec, built, report);
}

}  // namespace waveops
