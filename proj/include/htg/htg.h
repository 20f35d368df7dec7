#ifndef HTG_H
#define HTG_H

/* C interface to the H-type group Fourier toolkit.
 *
 * Conventions:
 *  - Functions returning a pointer return NULL on failure; functions
 *    returning int use the documented status codes.  In both cases
 *    htg_last_error() describes the most recent failure on the calling
 *    thread.
 *  - Strings returned as char* are owned by the caller and must be released
 *    with htg_string_free().
 *  - Handles are opaque and must be released with their _destroy function.
 */

#include <stddef.h>

#if defined(_WIN32)
#define HTG_API __declspec(dllexport)
#else
#define HTG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* ----------------------------------------------------------- diagnostics */

/* Message for the last failed call on this thread; empty string if none. */
HTG_API const char* htg_last_error(void);

/* Semantic version of the library. */
HTG_API const char* htg_version(void);

/* Release a string returned by this library. NULL is a no-op. */
HTG_API void htg_string_free(char* s);

/* ------------------------------------------------------------- commands */

/* Run a batch command: one of "verify", "evolve", "kernel",
 * "projector-norms", "strichartz-scan".  config_json may be NULL or empty
 * (defaults apply).  Artifacts (manifest.json plus the command output) are
 * written under out_dir, which is created when missing; "." when NULL.
 * When report_json is non-NULL, *report_json receives a JSON report
 * (release with htg_string_free).
 *
 * Returns 0 on success, 1 when a checked property fails, 2 on usage or
 * configuration errors. */
HTG_API int htg_run_command(const char* command, const char* config_json,
                            const char* out_dir, char** report_json);

/* ------------------------------------------------------------ structures */

typedef struct htg_structure htg_structure;

/* Heisenberg group H^d (d >= 1, vertical dimension 1). */
HTG_API htg_structure* htg_structure_heisenberg(int d);
/* Quaternionic H-type group (d a positive multiple of 2, vertical dim 3). */
HTG_API htg_structure* htg_structure_quaternionic(int d);
/* From JSON {"d": int, "m": int, "L": [[...], ...]}; "L" omitted means
 * Heisenberg.  The bracket matrices are validated to satisfy the H-type
 * identity. */
HTG_API htg_structure* htg_structure_from_json(const char* json_text);
HTG_API char* htg_structure_to_json(const htg_structure* s);
HTG_API int htg_structure_d(const htg_structure* s); /* -1 on NULL */
HTG_API int htg_structure_m(const htg_structure* s); /* -1 on NULL */
HTG_API void htg_structure_destroy(htg_structure* s);

/* --------------------------------------------------------------- fields */

typedef struct htg_field htg_field;

/* Sample an initial-data family on the grid {(x, z): |x_i| < L_x, |z_a| <
 * L_z} with n_x points per horizontal axis and n_z per vertical axis.
 * Families: "gaussian", "coherent(x0,xi0)", "hermite_mode(lambda,k)",
 * "bgx-transport". */
HTG_API htg_field* htg_field_create(const htg_structure* s, const char* family,
                                    int n_x, double L_x, int n_z, double L_z);
/* L^2 norm of the sampled field; negative on error. */
HTG_API double htg_field_l2(const htg_field* f);
HTG_API void htg_field_destroy(htg_field* f);

/* -------------------------------------------------------- admissibility */

/* Check the Strichartz admissibility of (p, q, r) on a group with
 * parameters (d, m); equation is "schrodinger" or "wave".  Exponents may be
 * INFINITY.  When sigma is non-NULL it receives the scaling-critical
 * Sobolev exponent.  Returns 1 when admissible, 0 when not, -1 on invalid
 * arguments. */
HTG_API int htg_admissible_check(double p, double q, double r, int d, int m,
                                 const char* equation, double* sigma);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HTG_H */
