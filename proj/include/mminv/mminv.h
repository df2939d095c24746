/* C API for the metric measure invariants library.
 *
 * All functions return an mminv_status; outputs are passed through pointers.
 * Handles are opaque and must be released with the matching _free call.
 * Strings returned through char** are heap-allocated JSON documents and must
 * be released with mminv_string_free.
 *
 * On any non-OK status, mminv_last_error() returns a thread-local message.
 */
#ifndef MMINV_MMINV_H
#define MMINV_MMINV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MMINV_API __declspec(dllexport)
#else
#define MMINV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mminv_space mminv_space;

typedef enum mminv_status {
  MMINV_OK = 0,
  MMINV_ERR_INVALID_ARGUMENT = 1,
  MMINV_ERR_PARSE = 2,
  MMINV_ERR_CAPACITY = 3,
  MMINV_ERR_DOMAIN = 4,
  MMINV_ERR_INTERNAL = 5
} mminv_status;

MMINV_API const char* mminv_version(void);

/* Thread-local message for the most recent failure in this thread. */
MMINV_API const char* mminv_last_error(void);

MMINV_API void mminv_string_free(char* s);
MMINV_API void mminv_space_free(mminv_space* space);

/* Space lifecycle. JSON format: {"labels":[...],"dist":[[...]],"mass":[...]}
 * with "inf" as the token for infinite distances. */
MMINV_API mminv_status mminv_space_from_json(const char* json, mminv_space** out);
MMINV_API mminv_status mminv_space_to_json(const mminv_space* space, char** out_json);
MMINV_API int mminv_space_size(const mminv_space* space);

/* Axiom check; report lists violated axioms with witnessing indices.
 * `valid` receives 1 or 0. */
MMINV_API mminv_status mminv_space_validate(const mminv_space* space, int* valid,
                                            char** report_json);

MMINV_API mminv_status mminv_space_scale(const mminv_space* space, double factor,
                                         mminv_space** out);
MMINV_API mminv_status mminv_space_truncate(const mminv_space* space, double cap,
                                            mminv_space** out);

/* Observable diameter. options_json (may be NULL): {"mode":"exact"|"heuristic",
 * "resolution":..., "seed":..., "restarts":..., "exact_cap":...}. */
MMINV_API mminv_status mminv_obs_diam(const mminv_space* space, double kappa,
                                      const char* options_json, double* value,
                                      char** report_json);

/* Separation distance for N+1 mass targets. options_json may be NULL. */
MMINV_API mminv_status mminv_sep(const mminv_space* space, const double* kappas,
                                 int num_kappas, const char* options_json, double* value,
                                 char** report_json);

/* kappa |-> invariant table. options_json (may be NULL):
 * {"grid":[...], "sep_levels":[...], "mode":..., "seed":..., "resolution":...}. */
MMINV_API mminv_status mminv_profile(const mminv_space* space, const char* options_json,
                                     char** report_json);

/* Prokhorov distance between two mass vectors on the points of `ambient`. */
MMINV_API mminv_status mminv_prokhorov(const mminv_space* ambient, const double* mu,
                                       const double* nu, int length, double* value);

/* Two-space comparison: prokhorov (same ambient only), box upper bound,
 * domination both ways, sampled observable-distance lower bound. */
MMINV_API mminv_status mminv_compare(const mminv_space* x, const mminv_space* y,
                                     const char* options_json, char** report_json);

/* Family experiment driven by a JSON config (see the CLI documentation).
 * Returns the report and, when csv_out is non-NULL, the CSV table. */
MMINV_API mminv_status mminv_family_run(const char* config_json, char** report_json,
                                        char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* MMINV_MMINV_H */
