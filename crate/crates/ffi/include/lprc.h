/* C ABI for the LPRC solver library.
 *
 * Instances are opaque handles built from JSON documents. Result payloads
 * are heap-allocated JSON strings owned by the caller; release them with
 * lprc_string_free. Every function returns an LPRC_* code; after a failing
 * call, lprc_last_error() yields a thread-local message valid until the
 * next failing call on the same thread.
 */

#ifndef LPRC_H
#define LPRC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define LPRC_OK 0
#define LPRC_ERR_NULL 1    /* a required pointer argument was null */
#define LPRC_ERR_PARSE 2   /* input not UTF-8 / not parseable */
#define LPRC_ERR_INVALID 3 /* instance failed structural validation */
#define LPRC_ERR_SOLVE 4   /* a solver reported an error */
#define LPRC_ERR_LIMIT 5   /* a search or enumeration limit was exceeded */

typedef struct LprcInstance LprcInstance;

/* Most recent error message on this thread, or NULL. Owned by the library. */
const char *lprc_last_error(void);

/* Parse an instance from a JSON document and validate it. On success writes
 * a handle to *out; free it with lprc_instance_free. */
int32_t lprc_instance_parse(const char *json, LprcInstance **out);

/* Release an instance handle. NULL is ignored. */
void lprc_instance_free(LprcInstance *handle);

/* Solve the full LP relaxation (exact != 0 selects exact rational
 * arithmetic) and write a fractional-plan JSON string to *out_json. */
int32_t lprc_relax_json(const LprcInstance *handle, int32_t exact,
                        char **out_json);

/* Run seeded randomized-rounding trials and write trial statistics JSON.
 * algorithm: "nc", "lc", "c", or "c-tol". eta/tau: rational strings such as
 * "1/5" or "0.2"; pass NULL for the defaults (eta 1/5, tau 1/10). */
int32_t lprc_round_json(const LprcInstance *handle, const char *algorithm,
                        const char *eta, const char *tau, uint64_t trials,
                        uint64_t seed, char **out_json);

/* Compute the exact optimum by exhaustive search and write a result JSON.
 * Returns LPRC_ERR_LIMIT when the instance exceeds the default oracle
 * limits. */
int32_t lprc_oracle_json(const LprcInstance *handle, char **out_json);

/* Release a string returned by this library. NULL is ignored. */
void lprc_string_free(char *s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LPRC_H */
