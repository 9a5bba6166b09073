/* waveops — C API for the circle-measure wave-operator laboratory.
 *
 * Opaque handles + status codes over the C++ core. All functions returning
 * waveops_status set a thread-local message retrievable with
 * waveops_last_error() on failure.
 */
#ifndef WAVEOPS_H
#define WAVEOPS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum waveops_status {
  WAVEOPS_OK = 0,
  /* an identity/feasibility check failed (CLI exit 1) */
  WAVEOPS_ERR_CHECK_FAILED = 1,
  /* bad argument or infeasible operator for the requested construction */
  WAVEOPS_ERR_INVALID_ARGUMENT = 2,
  /* spec/file parse error (CLI exit 2) */
  WAVEOPS_ERR_PARSE = 3,
  /* missing/unwritable file (CLI exit 2) */
  WAVEOPS_ERR_IO = 4,
  WAVEOPS_ERR_INTERNAL = 5
} waveops_status;

const char* waveops_version(void);
/* message for the most recent failure on this thread; never NULL */
const char* waveops_last_error(void);

/* ---- measures ---------------------------------------------------------- */

typedef struct waveops_measure waveops_measure;

waveops_status waveops_measure_uniform(uint64_t atom_count,
                                       waveops_measure** out);
waveops_status waveops_measure_cantor(int32_t level, waveops_measure** out);
waveops_status waveops_measure_riesz(const double* coeffs,
                                     const int64_t* freqs,
                                     uint64_t term_count, uint64_t grid,
                                     waveops_measure** out);
waveops_status waveops_measure_load(const char* path, waveops_measure** out);
waveops_status waveops_measure_save(const waveops_measure* mu,
                                    const char* path);
void waveops_measure_free(waveops_measure* mu);

uint64_t waveops_measure_size(const waveops_measure* mu);
double waveops_measure_total_mass(const waveops_measure* mu);
double waveops_measure_min_gap(const waveops_measure* mu);
double waveops_measure_min_gap_phase(const waveops_measure* mu);
int64_t waveops_measure_horizon(const waveops_measure* mu);

waveops_status waveops_fourier_coefficient(const waveops_measure* mu,
                                           int64_t n, double* re, double* im);
waveops_status waveops_wiener_average(const waveops_measure* mu,
                                      int64_t n_terms, double* out);

/* ---- batch drivers (the CLI surface) ------------------------------------ */

/* Runs a verification suite. Exactly one of builtin_name ("paper-examples",
 * "identities") and spec_path may be non-NULL. Prints one line per check to
 * stdout; writes verify_report.json under out_dir when given. tol <= 0 uses
 * the default identity tolerance. Returns WAVEOPS_ERR_CHECK_FAILED when any
 * check fails; failures (optional) receives the count. */
waveops_status waveops_run_verify(const char* builtin_name,
                                  const char* spec_path, const char* out_dir,
                                  double tol, uint64_t* failures);

/* Runs the convergence experiment described by the spec file and writes one
 * CSV per trace plus manifest.json. out_dir overrides the spec's output_dir;
 * one of the two must be present. seed (when has_seed_override) replaces
 * operator.seed. Deterministic: identical spec+seed produce byte-identical
 * files. */
waveops_status waveops_run_converge(const char* spec_path,
                                    const char* out_dir,
                                    int has_seed_override,
                                    uint64_t seed_override);

/* Writes the Fourier profile CSV (n,re,im,abs,cesaro_abs,wiener) of the
 * spec's measure up to fourier.n_max (n_max_override > 0 replaces it).
 * out_path NULL prints to stdout. */
waveops_status waveops_run_fourier(const char* spec_path,
                                   const char* out_path,
                                   int64_t n_max_override);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WAVEOPS_H */
