#ifndef CIRCLE_ERGODIC_H
#define CIRCLE_ERGODIC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CeStatus {
  CE_STATUS_OK = 0,
  CE_STATUS_VERIFICATION_FAILED = 1,
  CE_STATUS_INVALID_INPUT = 2,
  CE_STATUS_RESOURCE_CAP = 3,
  CE_STATUS_NULL_POINTER = 4,
  CE_STATUS_PANIC = 5,
} CeStatus;

/**
 * A piecewise-linear circle map.
 */
typedef struct CeMap CeMap;

/**
 * A finite measure on the circle: atoms plus piecewise-constant density.
 */
typedef struct CeMeasure CeMeasure;

/**
 * A shredded map together with its trapping report.
 */
typedef struct CeShred CeShred;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string; do not free.
 */
const char *ce_version(void);

/**
 * Copy of the calling thread's last error message, or NULL after a success.
 */
char *ce_last_error(void);

/**
 * # Safety
 * `s` is NULL or a string returned by this library, not yet freed.
 */
void ce_string_free(char *s);

/**
 * Map from its JSON form (`breakpoints`, `liftValues`).
 *
 * # Safety
 * `json` is a nul-terminated string; `out` is writable.
 */
enum CeStatus ce_map_from_json(const char *json, struct CeMap **out);

/**
 * Map from `len` breakpoints `0 = x_0 < ... < x_{len-1} = 1` and lift values.
 *
 * # Safety
 * `breakpoints` and `values` point to `len` nul-terminated strings each.
 */
enum CeStatus ce_map_new(const char *const *breakpoints,
                         const char *const *values,
                         size_t len,
                         struct CeMap **out);

/**
 * # Safety
 * `angle` is a nul-terminated rational; `out` is writable.
 */
enum CeStatus ce_map_rotation(const char *angle, struct CeMap **out);

/**
 * `x -> d x mod 1`.
 *
 * # Safety
 * `out` is writable.
 */
enum CeStatus ce_map_expanding(int64_t degree, struct CeMap **out);

/**
 * # Safety
 * `map` is a live handle; `out` is writable.
 */
enum CeStatus ce_map_to_json(const struct CeMap *map, char **out);

/**
 * `f(x)` in `[0, 1)`.
 *
 * # Safety
 * `map` is a live handle, `x` a nul-terminated rational, `out` writable.
 */
enum CeStatus ce_map_evaluate(const struct CeMap *map, const char *x, char **out);

/**
 * `f ∘ g`.
 *
 * # Safety
 * `f`, `g` are live handles; `out` is writable.
 */
enum CeStatus ce_map_compose(const struct CeMap *f, const struct CeMap *g, struct CeMap **out);

/**
 * Uniform distance `sup_x d(f(x), g(x))`.
 *
 * # Safety
 * `f`, `g` are live handles; `out` is writable.
 */
enum CeStatus ce_map_c0_distance(const struct CeMap *f, const struct CeMap *g, char **out);

/**
 * Rotation number of a homeomorphism. Both outputs get the same value when
 * a periodic orbit of period at most `max_period` pins it exactly;
 * otherwise they bracket it.
 *
 * # Safety
 * `map` is a live handle; `lower`, `upper` are writable.
 */
enum CeStatus ce_map_rotation_number(const struct CeMap *map,
                                     size_t max_period,
                                     char **lower,
                                     char **upper);

/**
 * Diagnostics JSON for the five labels. `protocol_json` may be NULL for the
 * default protocol.
 *
 * # Safety
 * `map` is a live handle; `protocol_json` NULL or nul-terminated; `out` writable.
 */
enum CeStatus ce_map_classify(const struct CeMap *map, const char *protocol_json, char **out);

/**
 * # Safety
 * `map` is NULL or a handle from this library, not yet freed.
 */
void ce_map_free(struct CeMap *map);

/**
 * # Safety
 * `out` is writable.
 */
enum CeStatus ce_measure_lebesgue(struct CeMeasure **out);

/**
 * # Safety
 * `x` is a nul-terminated rational; `out` is writable.
 */
enum CeStatus ce_measure_dirac(const char *x, struct CeMeasure **out);

/**
 * # Safety
 * `json` is a nul-terminated string; `out` is writable.
 */
enum CeStatus ce_measure_from_json(const char *json, struct CeMeasure **out);

/**
 * # Safety
 * `mu` is a live handle; `out` is writable.
 */
enum CeStatus ce_measure_to_json(const struct CeMeasure *mu, char **out);

/**
 * `f_* mu`, refused with `RESOURCE_CAP` past `max_pieces` atoms and pieces.
 *
 * # Safety
 * `mu`, `f` are live handles; `out` is writable.
 */
enum CeStatus ce_measure_pushforward(const struct CeMeasure *mu,
                                     const struct CeMap *f,
                                     size_t max_pieces,
                                     struct CeMeasure **out);

/**
 * # Safety
 * `mu` is a live handle; `out` is writable.
 */
enum CeStatus ce_measure_total_mass(const struct CeMeasure *mu, char **out);

/**
 * Exact equality of two measures.
 *
 * # Safety
 * `a`, `b` are live handles; `out` is writable.
 */
enum CeStatus ce_measure_equal(const struct CeMeasure *a, const struct CeMeasure *b, bool *out);

/**
 * # Safety
 * `mu` is NULL or a handle from this library, not yet freed.
 */
void ce_measure_free(struct CeMeasure *mu);

/**
 * Shreds `f` at scale `eps` with the default configuration.
 *
 * # Safety
 * `f` is a live handle, `eps` a nul-terminated rational, `out` writable.
 */
enum CeStatus ce_shred(const struct CeMap *f, const char *eps, struct CeShred **out);

/**
 * A copy of the shredded map.
 *
 * # Safety
 * `s` is a live handle; `out` is writable.
 */
enum CeStatus ce_shred_map(const struct CeShred *s, struct CeMap **out);

/**
 * # Safety
 * `s` is a live handle; `out` is writable.
 */
enum CeStatus ce_shred_region_count(const struct CeShred *s, size_t *out);

/**
 * # Safety
 * `s` is a live handle; `out` is writable.
 */
enum CeStatus ce_shred_report_json(const struct CeShred *s, char **out);

/**
 * Checks `map` against the trapping regions of `s`. Returns `OK` or
 * `VERIFICATION_FAILED`; `min_slack` (may be NULL) receives the smallest
 * margin, or stays NULL when there is none.
 *
 * # Safety
 * `map`, `s` are live handles; `min_slack` NULL or writable.
 */
enum CeStatus ce_shred_verify(const struct CeMap *map, const struct CeShred *s, char **min_slack);

/**
 * # Safety
 * `s` is NULL or a handle from this library, not yet freed.
 */
void ce_shred_free(struct CeShred *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCLE_ERGODIC_H */
