#include "waveops/waveops.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "experiment.hpp"
#include "measure.hpp"
#include "specfile.hpp"
#include "verify_suite.hpp"

struct waveops_measure {
  waveops::MeasurePtr ptr;
};

namespace {

thread_local std::string g_last_error = "";

waveops_status fail(waveops_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// maps core exceptions onto the status codes
template <typename F>
waveops_status guarded(F&& body) {
  try {
    return body();
  } catch (const waveops::SpecError& e) {
    return fail(WAVEOPS_ERR_PARSE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(WAVEOPS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.rfind("cannot", 0) == 0) return fail(WAVEOPS_ERR_IO, what);
    return fail(WAVEOPS_ERR_INTERNAL, what);
  } catch (const std::exception& e) {
    return fail(WAVEOPS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WAVEOPS_ERR_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* waveops_version(void) { return "waveops 0.1.0"; }

const char* waveops_last_error(void) { return g_last_error.c_str(); }

waveops_status waveops_measure_uniform(uint64_t atom_count,
                                       waveops_measure** out) {
  return guarded([&]() -> waveops_status {
    if (!out) return fail(WAVEOPS_ERR_INVALID_ARGUMENT, "null output handle");
    *out = new waveops_measure{waveops::make_uniform(atom_count)};
    return WAVEOPS_OK;
  });
}

waveops_status waveops_measure_cantor(int32_t level, waveops_measure** out) {
  return guarded([&]() -> waveops_status {
    if (!out) return fail(WAVEOPS_ERR_INVALID_ARGUMENT, "null output handle");
    *out = new waveops_measure{waveops::make_cantor(level)};
    return WAVEOPS_OK;
  });
}

waveops_status waveops_measure_riesz(const double* coeffs,
                                     const int64_t* freqs,
                                     uint64_t term_count, uint64_t grid,
                                     waveops_measure** out) {
  return guarded([&]() -> waveops_status {
    if (!out || (term_count > 0 && (!coeffs || !freqs))) {
      return fail(WAVEOPS_ERR_INVALID_ARGUMENT, "null argument");
    }
    std::vector<double> c(coeffs, coeffs + term_count);
    std::vector<std::int64_t> f(freqs, freqs + term_count);
    *out = new waveops_measure{waveops::make_riesz(c, f, grid)};
    return WAVEOPS_OK;
  });
}

waveops_status waveops_measure_load(const char* path, waveops_measure** out) {
  return guarded([&]() -> waveops_status {
    if (!out || !path) {
      return fail(WAVEOPS_ERR_INVALID_ARGUMENT, "null argument");
    }
    *out = new waveops_measure{waveops::load_measure_file(path)};
    return WAVEOPS_OK;
  });
}

waveops_status waveops_measure_save(const waveops_measure* mu,
                                    const char* path) {
  return guarded([&]() -> waveops_status {
    if (!mu || !path) {
      return fail(WAVEOPS_ERR_INVALID_ARGUMENT, "null argument");
    }
    waveops::save_measure_file(*mu->ptr, path);
    return WAVEOPS_OK;
  });
}

void waveops_measure_free(waveops_measure* mu) { delete mu; }

uint64_t waveops_measure_size(const waveops_measure* mu) {
  return mu ? mu->ptr->size() : 0;
}

double waveops_measure_total_mass(const waveops_measure* mu) {
  return mu ? mu->ptr->total_mass() : 0.0;
}

double waveops_measure_min_gap(const waveops_measure* mu) {
  return mu ? mu->ptr->min_gap() : 0.0;
}

double waveops_measure_min_gap_phase(const waveops_measure* mu) {
  return mu ? mu->ptr->min_gap_phase() : 0.0;
}

int64_t waveops_measure_horizon(const waveops_measure* mu) {
  return mu ? mu->ptr->effective_horizon() : 0;
}

waveops_status waveops_fourier_coefficient(const waveops_measure* mu,
                                           int64_t n, double* re, double* im) {
  return guarded([&]() -> waveops_status {
    if (!mu || !re || !im) {
      return fail(WAVEOPS_ERR_INVALID_ARGUMENT, "null argument");
    }
    const auto v = waveops::fourier_coefficient(*mu->ptr, n);
    *re = v.real();
    *im = v.imag();
    return WAVEOPS_OK;
  });
}

waveops_status waveops_wiener_average(const waveops_measure* mu,
                                      int64_t n_terms, double* out) {
  return guarded([&]() -> waveops_status {
    if (!mu || !out) {
      return fail(WAVEOPS_ERR_INVALID_ARGUMENT, "null argument");
    }
    *out = waveops::wiener_average(*mu->ptr, n_terms);
    return WAVEOPS_OK;
  });
}

waveops_status waveops_run_verify(const char* builtin_name,
                                  const char* spec_path, const char* out_dir,
                                  double tol, uint64_t* failures) {
  return guarded([&]() -> waveops_status {
    if ((builtin_name == nullptr) == (spec_path == nullptr)) {
      return fail(WAVEOPS_ERR_PARSE,
                  "verify: exactly one of builtin name and spec path required");
    }
    waveops::VerifyReport report;
    if (builtin_name) {
      report = waveops::verify_builtin(builtin_name, tol);
    } else {
      waveops::ExperimentSpec spec =
          waveops::parse_experiment_spec_file(spec_path);
      waveops::require_n_grid(spec);
      if (tol > 0) spec.tol.identity = tol;
      report = waveops::verify_spec(spec);
    }
    report.print(std::cout);
    if (out_dir) {
      std::filesystem::create_directories(out_dir);
      std::ofstream out(std::filesystem::path(out_dir) /
                        "verify_report.json");
      if (!out) {
        return fail(WAVEOPS_ERR_IO,
                    std::string("cannot write verify report in ") + out_dir);
      }
      out << report.to_json();
    }
    if (failures) *failures = report.failures();
    if (!report.all_pass()) {
      return fail(WAVEOPS_ERR_CHECK_FAILED,
                  std::to_string(report.failures()) + " check(s) failed");
    }
    return WAVEOPS_OK;
  });
}

waveops_status waveops_run_converge(const char* spec_path,
                                    const char* out_dir,
                                    int has_seed_override,
                                    uint64_t seed_override) {
  return guarded([&]() -> waveops_status {
    if (!spec_path) return fail(WAVEOPS_ERR_PARSE, "converge: spec required");
    waveops::ExperimentSpec spec =
        waveops::parse_experiment_spec_file(spec_path);
    if (has_seed_override) spec.op.seed = seed_override;
    waveops::require_n_grid(spec);
    std::string dir;
    if (out_dir) {
      dir = out_dir;
    } else if (spec.output_dir) {
      dir = *spec.output_dir;
    } else {
      return fail(WAVEOPS_ERR_PARSE,
                  "converge: no output directory (spec output_dir or --out)");
    }
    const waveops::BuiltExperiment built = waveops::build_experiment(spec);
    const auto pairs = waveops::build_vector_family(spec.vectors, built);
    const waveops::ConvergenceReport report =
        waveops::run_experiment(built, pairs, spec.n_grid);
    waveops::write_report_files(dir, spec, built, report);
    return WAVEOPS_OK;
  });
}

waveops_status waveops_run_fourier(const char* spec_path,
                                   const char* out_path,
                                   int64_t n_max_override) {
  return guarded([&]() -> waveops_status {
    if (!spec_path) return fail(WAVEOPS_ERR_PARSE, "fourier: spec required");
    const waveops::ExperimentSpec spec =
        waveops::parse_experiment_spec_file(spec_path);
    std::int64_t n_max = 0;
    if (n_max_override > 0) {
      n_max = n_max_override;
    } else if (spec.fourier_n_max) {
      n_max = *spec.fourier_n_max;
    } else {
      return fail(WAVEOPS_ERR_PARSE,
                  "fourier: fourier.n_max missing from spec (or pass --nmax)");
    }
    const waveops::MeasurePtr mu = waveops::build_measure(spec.measure);
    const waveops::FourierProfile profile = waveops::decay_profile(*mu, n_max);
    if (out_path) {
      std::ofstream out(out_path);
      if (!out) {
        return fail(WAVEOPS_ERR_IO,
                    std::string("cannot write profile to ") + out_path);
      }
      waveops::write_profile_csv(out, profile, /*with_wiener=*/true);
    } else {
      waveops::write_profile_csv(std::cout, profile, /*with_wiener=*/true);
    }
    return WAVEOPS_OK;
  });
}

}  // extern "C"
