#pragma once

// The identity verification suites behind the verify command: the worked
// examples (scalar Cesaro formula, rank-two gamma, counterexample
// decomposition) and randomized exact-identity sweeps (telescoping, the
// difference/sum lemma grid, eta symmetries, Y construction, the forward
// implication of the symmetry proposition).

#include <iosfwd>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace waveops {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  std::size_t failures() const;
  std::string to_json() const;
  void print(std::ostream& out) const;
};

// name: "paper-examples" or "identities"
VerifyReport verify_builtin(const std::string& name, double identity_tol);

// verify the identities for the operator class declared by a spec
VerifyReport verify_spec(const ExperimentSpec& spec);

}  // namespace waveops
