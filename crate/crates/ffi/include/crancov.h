#ifndef CRANCOV_H
#define CRANCOV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; 2, 3 and 4 match the command-line exit codes.
typedef enum CrancovStatus {
  CRANCOV_STATUS_OK = 0,
  // Null pointer, invalid UTF-8 or a zero-length buffer.
  CRANCOV_STATUS_INVALID_ARGUMENT = 1,
  CRANCOV_STATUS_CONFIG = 2,
  CRANCOV_STATUS_IO = 3,
  CRANCOV_STATUS_NUMERIC = 4,
  // An internal panic was caught.
  CRANCOV_STATUS_INTERNAL = 5,
} CrancovStatus;

// A parsed scenario: network parameters plus simulation plan.
typedef struct CrancovScenario CrancovScenario;

// Percentile and mean rates in bits/s/Hz.
typedef struct CrancovRateProfile {
  double p5;
  double p10;
  double p50;
  double mean;
} CrancovRateProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a scenario from NUL-terminated `key = value` text.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
// The handle written to `*out` must be released with
// [`crancov_scenario_free`].
enum CrancovStatus crancov_scenario_parse(const char *text, struct CrancovScenario **out);

// Releases a scenario handle. Null is ignored.
//
// # Safety
// `scenario` must come from [`crancov_scenario_parse`] and not be used
// afterwards.
void crancov_scenario_free(struct CrancovScenario *scenario);

// Analytic coverage at `len` thresholds in dB, written to `coverage_out`.
//
// # Safety
// Both arrays must hold `len` doubles.
enum CrancovStatus crancov_coverage(const struct CrancovScenario *scenario,
                                    const double *thresholds_db,
                                    size_t len,
                                    double *coverage_out);

// Analytic rate profile of the scenario.
//
// # Safety
// `out` must be a valid pointer.
enum CrancovStatus crancov_rate_profile(const struct CrancovScenario *scenario,
                                        struct CrancovRateProfile *out);

// Monte Carlo coverage with the scenario's plan, overriding its budget and
// seed. `halfwidth_out` receives 95% half-widths and may be null.
//
// # Safety
// Arrays must hold `len` doubles.
enum CrancovStatus crancov_simulate_coverage(const struct CrancovScenario *scenario,
                                             uint64_t realizations,
                                             uint64_t seed,
                                             const double *thresholds_db,
                                             size_t len,
                                             double *coverage_out,
                                             double *halfwidth_out);

// Message of the last failed call on this thread, or null. Valid until the
// next call into this library on the same thread.
const char *crancov_last_error(void);

// Library version as a static NUL-terminated string.
const char *crancov_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRANCOV_H */
