#ifndef MINKPOLY_H
#define MINKPOLY_H

#include <stddef.h>
#include <stdint.h>

typedef enum MpStatus {
  MP_STATUS_OK = 0,
  MP_STATUS_NULL_POINTER = 1,
  MP_STATUS_INVALID_ARGUMENT = 2,
  MP_STATUS_INVALID_MASS = 3,
  MP_STATUS_NO_CLOSURE = 4,
  MP_STATUS_PARSE = 5,
  MP_STATUS_VALIDATION = 6,
  MP_STATUS_SINGULAR_OPERATOR = 7,
  MP_STATUS_RANK_DEFICIENT = 8,
  MP_STATUS_NOT_CALIBRATED = 9,
  MP_STATUS_NOT_TANGENT = 10,
  MP_STATUS_STEP_TOO_LARGE = 11,
  MP_STATUS_CONFIG = 12,
  MP_STATUS_IO = 13,
  MP_STATUS_BUFFER_TOO_SMALL = 14,
  MP_STATUS_VERIFICATION_FAILED = 15,
  MP_STATUS_PANIC = 16,
} MpStatus;

/*
 Opaque polygon handle.
 */
typedef struct MpPolygon MpPolygon;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL. Valid until the
 next call into the library from the same thread.
 */
const char *mp_last_error_message(void);

/*
 Samples a closed polygon. `masses` holds `masses_len` values; a single
 value is broadcast to all `n` edges.

 # Safety
 `masses` must point to `masses_len` doubles and `out` must be writable.
 */
enum MpStatus mp_polygon_sample(size_t n,
                                const double *masses,
                                size_t masses_len,
                                uint64_t seed,
                                struct MpPolygon **out);

/*
 Parses and validates a polygon document.

 # Safety
 `json` must be a NUL-terminated string and `out` writable.
 */
enum MpStatus mp_polygon_from_json(const char *json, struct MpPolygon **out);

/*
 Serializes a polygon; free the result with `mp_string_free`.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum MpStatus mp_polygon_to_json(const struct MpPolygon *p, char **out);

/*
 # Safety
 `p` must come from this library and not be used afterwards. NULL is ignored.
 */
void mp_polygon_free(struct MpPolygon *p);

/*
 # Safety
 `s` must come from this library and not be used afterwards. NULL is ignored.
 */
void mp_string_free(char *s);

/*
 Number of edges, or 0 for a NULL handle.

 # Safety
 `p` must be NULL or a live handle.
 */
size_t mp_polygon_len(const struct MpPolygon *p);

/*
 Copies the edges into `out` (`3n` doubles).

 # Safety
 `out` must hold `out_len` doubles.
 */
enum MpStatus mp_polygon_edges(const struct MpPolygon *p, double *out, size_t out_len);

/*
 Copies the masses into `out` (`n` doubles).

 # Safety
 `out` must hold `out_len` doubles.
 */
enum MpStatus mp_polygon_masses(const struct MpPolygon *p, double *out, size_t out_len);

/*
 `(u, v)` for 3-vectors.

 # Safety
 `u` and `v` must each point to 3 doubles.
 */
enum MpStatus mp_mink_dot(const double *u, const double *v, double *out);

/*
 `[u, v]` for 3-vectors.

 # Safety
 `u`, `v` and `out` must each point to 3 doubles.
 */
enum MpStatus mp_mink_bracket(const double *u, const double *v, double *out);

/*
 Dimension `2n − 6` of the calibrated slice at `p`.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum MpStatus mp_tangent_dim(const struct MpPolygon *p, size_t *out);

/*
 Writes a `g`-orthonormal basis of the calibrated slice, vector after
 vector, into `out`, which must hold `dim · 3n` doubles.

 # Safety
 `out` must hold `out_len` doubles.
 */
enum MpStatus mp_tangent_basis(const struct MpPolygon *p, double *out, size_t out_len);

/*
 Gauge-fixes a raw tangent vector.

 # Safety
 `q` and `out` must each hold `len` doubles.
 */
enum MpStatus mp_calibrate(const struct MpPolygon *p, const double *q, double *out, size_t len);

/*
 `I q` for a calibrated tangent vector.

 # Safety
 `q` and `out` must each hold `len` doubles.
 */
enum MpStatus mp_apply_i(const struct MpPolygon *p, const double *q, double *out, size_t len);

/*
 `ω(q, q2)`; raw tangent vectors are accepted.

 # Safety
 `q` and `q2` must each hold `len` doubles; `out` must be writable.
 */
enum MpStatus mp_omega(const struct MpPolygon *p,
                       const double *q,
                       const double *q2,
                       size_t len,
                       double *out);

/*
 `g(q, q2)` for calibrated tangent vectors.

 # Safety
 `q` and `q2` must each hold `len` doubles; `out` must be writable.
 */
enum MpStatus mp_metric_g(const struct MpPolygon *p,
                          const double *q,
                          const double *q2,
                          size_t len,
                          double *out);

/*
 Normal part `πx` of an ambient vector.

 # Safety
 `x` and `out` must each hold `len` doubles.
 */
enum MpStatus mp_project_normal(const struct MpPolygon *p,
                                const double *x,
                                double *out,
                                size_t len);

/*
 Calibrated tangent part `x − πx` of an ambient vector.

 # Safety
 `x` and `out` must each hold `len` doubles.
 */
enum MpStatus mp_project_tangent(const struct MpPolygon *p,
                                 const double *x,
                                 double *out,
                                 size_t len);

/*
 Largest `‖N_I‖_g` over `pairs` random coordinate-field pairs, for each step
 in `h` (in units of the mean mass). Writes `h_len` values into `out`.

 # Safety
 `h` and `out` must each hold `h_len` doubles.
 */
enum MpStatus mp_nijenhuis_sweep(const struct MpPolygon *p,
                                 const double *h,
                                 size_t h_len,
                                 size_t pairs,
                                 uint64_t seed,
                                 double *out);

/*
 Runs the verification suite with a JSON configuration (NULL or `{}` for
 defaults) and returns the JSON report. A failed verdict is reported as
 `VerificationFailed` with the report still written.

 # Safety
 `config_json` must be NULL or NUL-terminated; `report` must be writable.
 */
enum MpStatus mp_run_suite_json(const char *config_json, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINKPOLY_H */
