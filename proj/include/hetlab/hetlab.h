#ifndef HETLAB_H
#define HETLAB_H

/* C interface to the hetlab shared library. Objects are opaque handles;
 * every call returns a status code and, on failure, leaves a message for
 * hetlab_last_error() on the calling thread. Strings returned through
 * char** out-parameters are owned by the caller and released with
 * hetlab_string_free(). */

#include <stdint.h>

#if defined(HETLAB_BUILDING_LIBRARY)
#define HETLAB_API __attribute__((visibility("default")))
#else
#define HETLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hetlab_status {
  HETLAB_OK = 0,
  HETLAB_E_DOMAIN = 1,
  HETLAB_E_PARSE = 2,
  HETLAB_E_CONFIG = 3,
  HETLAB_E_NO_REAL_EQUILIBRIA = 4,
  HETLAB_E_SIGN_PATTERN = 5,
  HETLAB_E_DEGENERATE = 6,
  HETLAB_E_NOT_SADDLE = 7,
  HETLAB_E_NO_UNSTABLE_DIRECTION = 8,
  HETLAB_E_PRECONDITION = 9,
  HETLAB_E_IO = 10,
  HETLAB_E_INVALID_ARGUMENT = 11,
  HETLAB_E_INTERNAL = 12
} hetlab_status;

typedef struct hetlab_coeffs hetlab_coeffs;

HETLAB_API const char* hetlab_version(void);
HETLAB_API const char* hetlab_status_name(hetlab_status s);
/* Message of the last failed call on this thread; "" if none. */
HETLAB_API const char* hetlab_last_error(void);
HETLAB_API void hetlab_string_free(char* s);

/* Coefficient sets: flat JSON objects with the 22 named coefficients. On
 * failure *out is set to NULL. */
HETLAB_API hetlab_status hetlab_coeffs_from_json(const char* json, hetlab_coeffs** out);
HETLAB_API hetlab_status hetlab_coeffs_reference(hetlab_coeffs** out);
HETLAB_API hetlab_status hetlab_coeffs_to_json(const hetlab_coeffs* c, char** out);
HETLAB_API hetlab_status hetlab_coeffs_get(const hetlab_coeffs* c, const char* name, double* value);
HETLAB_API hetlab_status hetlab_coeffs_set(hetlab_coeffs* c, const char* name, double value);
HETLAB_API void hetlab_coeffs_free(hetlab_coeffs* c);

HETLAB_API hetlab_status hetlab_eval_field(const hetlab_coeffs* c, const double x[4], double f[4]);
/* Row-major: jac[4 * i + j] = d f_i / d x_j. */
HETLAB_API hetlab_status hetlab_eval_jacobian(const hetlab_coeffs* c, const double x[4],
                                              double jac[16]);

/* {"conditions": [...], "construction": {...}}; *table1_pass is 1 when every
 * sign-table row passes. */
HETLAB_API hetlab_status hetlab_check(const hetlab_coeffs* c, char** report_json,
                                      int* table1_pass);

/* mode: "table1_literal" or "direct_conditions"; threads 0 = default.
 * *found is 1 with {"status": "found", ...} or 0 with the failure histogram. */
HETLAB_API hetlab_status hetlab_find(const char* mode, const char* box_json, uint64_t seed,
                                     uint64_t max_samples, unsigned threads, char** result_json,
                                     int* found);

/* Integrates from x0 up to tmax. csv gets "t,x1,x2,x3,x4" rows; info_json
 * reports the termination reason, step counts and final state. */
HETLAB_API hetlab_status hetlab_simulate(const hetlab_coeffs* c, const double x0[4], double tmax,
                                         char** csv, char** info_json);

/* cycle: "P13cycle" or "P14cycle". samples_csv may be NULL. */
HETLAB_API hetlab_status hetlab_basin_fraction(const hetlab_coeffs* c, const char* cycle,
                                               double eps, uint64_t n, uint64_t seed,
                                               unsigned threads, char** report_json,
                                               char** samples_csv);

/* Ladder of `levels` radii from 1e-2 halving each level. With cycle NULL the
 * base point is the sink `sink[4]` (control case); otherwise it lies at
 * arc_fraction along the connection C_ab. */
HETLAB_API hetlab_status hetlab_stability_index(const hetlab_coeffs* c, const char* cycle,
                                                double arc_fraction, const double sink[4],
                                                unsigned levels, uint64_t n, uint64_t seed,
                                                unsigned threads, char** report_json);

/* budget_json may be NULL or an object with any of "eps" (array), "samples",
 * "seed", "skip_basin", "threads", "sample_csv". With "sample_csv": true each
 * basin entry carries its per-sample CSV under "samples_csv". */
HETLAB_API hetlab_status hetlab_adjudicate(const hetlab_coeffs* c, const char* budget_json,
                                           char** report_json);

#ifdef __cplusplus
}
#endif

#endif
