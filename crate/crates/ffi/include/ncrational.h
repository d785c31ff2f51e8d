#ifndef NCRATIONAL_H
#define NCRATIONAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NcStatus {
  NC_STATUS_OK = 0,
  NC_STATUS_SYNTAX_ERROR = 1,
  NC_STATUS_VARIABLE_OUT_OF_RANGE = 2,
  NC_STATUS_LITERAL_OVERFLOW = 3,
  NC_STATUS_NOT_A_POLYNOMIAL = 4,
  NC_STATUS_NOT_IN_DOMAIN = 5,
  NC_STATUS_NOT_REGULAR_AT_ZERO = 6,
  NC_STATUS_VALUE_AT_ZERO_IS_ZERO = 7,
  NC_STATUS_DIMENSION_MISMATCH = 8,
  NC_STATUS_SPECTRAL_RADIUS_NOT_BELOW_ONE = 9,
  NC_STATUS_NOT_IN_FOCK_SPACE = 10,
  NC_STATUS_NOT_A_BOUNDED_MULTIPLIER = 11,
  NC_STATUS_JOINTLY_NILPOTENT = 12,
  NC_STATUS_CERTIFICATION_FAILED = 13,
  NC_STATUS_INVALID_INPUT = 14,
  NC_STATUS_IO_ERROR = 15,
  NC_STATUS_NULL_POINTER = 100,
  NC_STATUS_INVALID_UTF8 = 101,
  NC_STATUS_PANIC = 102,
} NcStatus;

/**
 * Opaque realization handle.
 */
typedef struct NcRealization NcRealization;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Compiles an expression in `z1..zd` to a realization.
 *
 * # Safety
 * `expr` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NcStatus nc_realization_from_expression(const char *expr,
                                             size_t d,
                                             struct NcRealization **out);

/**
 * Reads a realization from its JSON form `{"d","n","A","b","c"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NcStatus nc_realization_from_json(const char *json, struct NcRealization **out);

/**
 * # Safety
 * `r` must come from this library and not be freed twice. Null is ignored.
 */
void nc_realization_free(struct NcRealization *r);

/**
 * State dimension, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t nc_realization_size(const struct NcRealization *r);

/**
 * Number of variables, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t nc_realization_vars(const struct NcRealization *r);

/**
 * Writes a new, minimal handle to `out`; `r` is left untouched.
 *
 * # Safety
 * `r` must be a live handle and `out` a valid pointer.
 */
enum NcStatus nc_realization_minimize(const struct NcRealization *r,
                                      double tol,
                                      struct NcRealization **out);

/**
 * JSON text of the realization; release it with [`nc_string_free`].
 *
 * # Safety
 * `r` must be a live handle and `out` a valid pointer.
 */
enum NcStatus nc_realization_to_json(const struct NcRealization *r, char **out);

/**
 * Joint spectral radius of the state matrices.
 *
 * # Safety
 * `r` must be a live handle and `out` a valid pointer.
 */
enum NcStatus nc_spr(const struct NcRealization *r, double *out);

/**
 * # Safety
 * `r` must be a live handle and `out` a valid pointer.
 */
enum NcStatus nc_h2_norm(const struct NcRealization *r, double *out);

/**
 * Membership verdict for a minimal handle; `spr` may be null.
 *
 * # Safety
 * `r` must be a live handle, `in_fock` a valid pointer.
 */
enum NcStatus nc_is_in_fock(const struct NcRealization *r, bool *in_fock, double *spr);

/**
 * Coefficient of the word `letters[0..len]` (letters are 1-based).
 *
 * # Safety
 * `letters` must point to `len` values (may be null when `len` is 0);
 * `re` and `im` must be valid pointers.
 */
enum NcStatus nc_taylor_coeff(const struct NcRealization *r,
                              const size_t *letters,
                              size_t len,
                              double *re,
                              double *im);

/**
 * Evaluates at the tuple `X_1..X_d` of `n × n` matrices.
 *
 * `x` holds `2·d·n²` doubles: matrices in order, each row-major with
 * interleaved real and imaginary parts. `out` receives `2·n²` doubles in the
 * same layout.
 *
 * # Safety
 * `x` and `out` must point to buffers of the sizes above.
 */
enum NcStatus nc_evaluate(const struct NcRealization *r, size_t n, const double *x, double *out);

/**
 * Message for the last failed call on this thread, or null. Release it with
 * [`nc_string_free`].
 */
char *nc_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void nc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCRATIONAL_H */
