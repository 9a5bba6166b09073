// waveops command-line front end. Links only the shared C API.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "waveops/waveops.h"

namespace {

// 0 success, 1 check failure, 2 usage/parse error
int exit_code(waveops_status status) {
  switch (status) {
    case WAVEOPS_OK:
      return 0;
    case WAVEOPS_ERR_CHECK_FAILED:
    case WAVEOPS_ERR_INVALID_ARGUMENT:
      return 1;
    case WAVEOPS_ERR_PARSE:
    case WAVEOPS_ERR_IO:
    case WAVEOPS_ERR_INTERNAL:
      return 2;
  }
  return 2;
}

int finish(waveops_status status) {
  if (status != WAVEOPS_OK) {
    std::fprintf(stderr, "waveops: %s\n", waveops_last_error());
  }
  return exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"waveops — averaged wave-operator experiments on singular "
               "circle measures"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, builtin;
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::int64_t n_max = 0;

  CLI::App* verify = app.add_subcommand(
      "verify", "run identity/verification suites (exit 1 on any failure)");
  verify->add_option("--spec", spec_path, "experiment spec file");
  verify->add_option("--builtin", builtin,
                     "built-in suite: paper-examples | identities");
  verify->add_option("--out", out_dir, "directory for verify_report.json");
  verify->add_option("--tol", tol, "identity tolerance override");

  CLI::App* converge = app.add_subcommand(
      "converge", "run a convergence experiment, emit trace CSVs + manifest");
  converge->add_option("--spec", spec_path, "experiment spec file")
      ->required();
  converge->add_option("--out", out_dir,
                       "output directory (overrides spec output_dir)");
  converge->add_option("--seed", seed, "override operator.seed");

  CLI::App* fourier = app.add_subcommand(
      "fourier", "emit the Fourier decay profile CSV of the spec's measure");
  fourier->add_option("--spec", spec_path, "spec file (measure.* keys)")
      ->required();
  fourier->add_option("--out", out_dir, "output CSV path (default stdout)");
  fourier->add_option("--nmax", n_max, "profile length override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  seed_given = converge->count("--seed") > 0;

  if (verify->parsed()) {
    if (spec_path.empty() == builtin.empty()) {
      std::fprintf(stderr,
                   "waveops verify: exactly one of --spec and --builtin is "
                   "required\n");
      return 2;
    }
    std::uint64_t failures = 0;
    return finish(waveops_run_verify(
        builtin.empty() ? nullptr : builtin.c_str(),
        spec_path.empty() ? nullptr : spec_path.c_str(),
        out_dir.empty() ? nullptr : out_dir.c_str(), tol, &failures));
  }
  if (converge->parsed()) {
    return finish(waveops_run_converge(
        spec_path.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
        seed_given ? 1 : 0, seed));
  }
  if (fourier->parsed()) {
    return finish(waveops_run_fourier(
        spec_path.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
        n_max));
  }
  return 2;
}
