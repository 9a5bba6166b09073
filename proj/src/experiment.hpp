#pragma once

// End-to-end convergence experiments: resolve an ExperimentSpec into a
// measure + commutator + identification operator + test-vector family, run
// the Cesaro traces of the difference/sum sequences against the family, fit
// decay exponents below the measure's effective horizon, and write the
// CSV/manifest outputs. Deterministic given the spec and seed.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specfile.hpp"
#include "symmetry.hpp"
#include "wave.hpp"

namespace waveops {

struct BuiltExperiment {
  MeasurePtr mu;
  Kernel kernel;        // commutator kernel
  OperatorMatrix x;     // identification operator, X U - U X = K
  GridFunction gamma;   // conjugation weight for ebar (constant 1 if none)
  double cond = 0.0;    // conditioning of the identification solve
  std::string measure_fingerprint;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, hash
};

MeasurePtr build_measure(const MeasureSpec& spec);
BuiltExperiment build_experiment(const ExperimentSpec& spec);

// Random kernels: entrywise standard complex Gaussian, projected onto the
// requested symmetry class, diagonal zeroed.
Kernel random_kernel(MeasurePtr mu, SymmetryClass symmetry, std::uint64_t seed);

struct TestPair {
  std::int64_t k = 0, l = 0;  // monomial indices, or -1 position for files
  GridFunction h1;
  GridFunction h2;
  std::string name;
};

std::vector<TestPair> build_vector_family(const VectorsSpec& vectors,
                                          const BuiltExperiment& built);

struct DecayFit {
  double exponent = 0.0;       // slope of log|trace| vs log N
  double log10_prefactor = 0.0;
  int points = 0;
};

struct Trace {
  std::string name;
  std::vector<Complex> cesaro_diff;  // per grid N
  std::vector<Complex> cesaro_sum;
  std::vector<Complex> raw;  // difference-sequence value at n = N
  std::optional<DecayFit> fit;
};

struct ConvergenceReport {
  std::vector<std::int64_t> grid;
  std::int64_t horizon = 0;
  std::vector<Trace> traces;
};

// Cesaro means of the difference/sum pairings over n = 0..N-1 for each grid
// N, via exact per-entry geometric means (cross-validated in tests against
// prefix-sum accumulation of the pairings).
ConvergenceReport run_experiment(const BuiltExperiment& built,
                                 const std::vector<TestPair>& pairs,
                                 const std::vector<std::int64_t>& n_grid);

// one CSV per trace: N,cesaro_diff_re,cesaro_diff_im,cesaro_sum_re,
// cesaro_sum_im,raw_re,raw_im
void write_trace_csv(std::ostream& out, const ConvergenceReport& report,
                     const Trace& trace);

// manifest: measure fingerprint, resolved spec text, horizon, fits, input
// hashes, tool version
std::string report_manifest(const ExperimentSpec& spec,
                            const BuiltExperiment& built,
                            const ConvergenceReport& report);

// writes all trace CSVs plus manifest.json under out_dir
void write_report_files(const std::string& out_dir,
                        const ExperimentSpec& spec,
                        const BuiltExperiment& built,
                        const ConvergenceReport& report);

}  // namespace waveops
