#pragma once

// Experiment spec files: a flat "dotted.key = value" text format (one pair
// per line, '#' comments). Unknown keys, missing required keys and malformed
// values are hard errors — a silently ignored typo would invalidate an
// experiment.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace waveops {

// Raised for anything that should map to the CLI usage/parse exit code.
struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MeasureKind { uniform, cantor, riesz, file };
enum class OperatorKind { rank_two, counterexample, random_kernel, kernel_file };
enum class SymmetryClass { antisymmetric, symmetric, none };
enum class RankTwoStyle { random, monomial };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::uniform;
  std::size_t m = 0;                 // uniform
  int level = 0;                     // cantor
  std::vector<double> coeffs;        // riesz
  std::vector<std::int64_t> freqs;   // riesz
  std::size_t grid = 0;              // riesz
  std::string path;                  // file
};

struct OperatorSpec {
  OperatorKind kind = OperatorKind::rank_two;
  SymmetryClass symmetry = SymmetryClass::none;
  bool symmetry_given = false;
  std::optional<std::uint64_t> seed;
  RankTwoStyle style = RankTwoStyle::random;
  std::int64_t p1 = 1, p2 = -1, q = 0;  // monomial rank-two exponents
  std::string path;                     // kernel_file
};

struct VectorsSpec {
  bool monomial = true;
  std::int64_t k_min = -8, k_max = 8;
  std::string path;  // explicit pair file
};

struct Tolerances {
  double identity = 1e-10;
  double condition = 1e8;
};

struct ExperimentSpec {
  MeasureSpec measure;
  OperatorSpec op;
  VectorsSpec vectors;
  std::vector<std::int64_t> n_grid;
  Tolerances tol;
  std::optional<std::string> output_dir;
  std::optional<std::int64_t> fourier_n_max;
  std::string raw_text;  // verbatim file content (hashed into manifests)
};

ExperimentSpec parse_experiment_spec_text(const std::string& text);
ExperimentSpec parse_experiment_spec_file(const std::string& path);

// n_grid presence/monotonicity is only enforced for the converge command
void require_n_grid(const ExperimentSpec& spec);

const char* to_string(MeasureKind kind);
const char* to_string(OperatorKind kind);
const char* to_string(SymmetryClass s);

}  // namespace waveops
