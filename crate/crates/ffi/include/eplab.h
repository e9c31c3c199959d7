#ifndef EPLAB_H
#define EPLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum EplabStatus {
  EPLAB_STATUS_OK = 0,
  EPLAB_STATUS_NULL_POINTER = 1,
  EPLAB_STATUS_INVALID_ARGUMENT = 2,
  EPLAB_STATUS_BUFFER_TOO_SMALL = 3,
  EPLAB_STATUS_BLOW_UP = 4,
  EPLAB_STATUS_IO = 5,
  EPLAB_STATUS_PANIC = 6,
} EplabStatus;

/**
 * Real velocity field on a grid.
 */
typedef struct EplabField EplabField;

/**
 * Periodic box `[0, length)^d` sampled on `n^d` points.
 */
typedef struct EplabGrid EplabGrid;

/**
 * An EP_alpha integration in progress.
 */
typedef struct EplabSimulation EplabSimulation;

/**
 * Integrator settings. `s` is the Sobolev index of the norm guard.
 */
typedef struct EplabParams {
  double alpha;
  double s;
  double cfl;
  double dt_max;
  double blowup_factor;
  size_t sample_every;
} EplabParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next eplab call on the same thread.
 */
const char *eplab_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *eplab_version(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum EplabStatus eplab_grid_new(uint32_t dim, uint32_t n, double length, struct EplabGrid **out);

/**
 * Number of samples per component, `n^d`; 0 for a null grid.
 *
 * # Safety
 * `grid` must be null or a live grid.
 */
size_t eplab_grid_points(const struct EplabGrid *grid);

/**
 * # Safety
 * `grid` must be null or come from [`eplab_grid_new`] and not be freed twice.
 */
void eplab_grid_free(struct EplabGrid *grid);

/**
 * Field from `d·n^d` samples laid out component by component.
 *
 * # Safety
 * `samples` must point to `len` readable doubles; `out` must be writable.
 */
enum EplabStatus eplab_field_new(const struct EplabGrid *grid,
                                 const double *samples,
                                 size_t len,
                                 struct EplabField **out);

/**
 * Seeded band-limited field with modes `0 < |j| <= k_max`, scaled to
 * `||u||_{H^s} = norm_hs`.
 *
 * # Safety
 * `grid` must be live; `out` must be writable.
 */
enum EplabStatus eplab_field_bandlimited(const struct EplabGrid *grid,
                                         size_t k_max,
                                         uint64_t seed,
                                         double s,
                                         double norm_hs,
                                         struct EplabField **out);

/**
 * Total sample count `d·n^d`; 0 for a null field.
 *
 * # Safety
 * `field` must be null or live.
 */
size_t eplab_field_len(const struct EplabField *field);

/**
 * Copies the samples into `buf`, which must hold [`eplab_field_len`] doubles.
 *
 * # Safety
 * `buf` must point to `cap` writable doubles.
 */
enum EplabStatus eplab_field_copy_samples(const struct EplabField *field, double *buf, size_t cap);

/**
 * `||u||_{H^s}`.
 *
 * # Safety
 * `field` must be live; `out` must be writable.
 */
enum EplabStatus eplab_field_sobolev_norm(const struct EplabField *field, double s, double *out);

/**
 * # Safety
 * `field` must be null or come from this library and not be freed twice.
 */
void eplab_field_free(struct EplabField *field);

/**
 * Writes an EPF1 snapshot.
 *
 * # Safety
 * `field` must be live; `path` a NUL-terminated UTF-8 string.
 */
enum EplabStatus eplab_snapshot_write(const struct EplabField *field,
                                      double time,
                                      double alpha,
                                      const char *path);

/**
 * Reads an EPF1 snapshot. `time` and `alpha` may be null.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` writable; `time` and
 * `alpha` null or writable.
 */
enum EplabStatus eplab_snapshot_read(const char *path,
                                     struct EplabField **out,
                                     double *time,
                                     double *alpha);

/**
 * Defaults for dimension `dim`.
 */
struct EplabParams eplab_params_default(uint32_t dim);

/**
 * Starts a simulation at `t = 0` from a copy of `u0`.
 *
 * # Safety
 * `u0` and `params` must be live; `out` writable.
 */
enum EplabStatus eplab_simulation_new(const struct EplabField *u0,
                                      const struct EplabParams *params,
                                      struct EplabSimulation **out);

/**
 * Integrates for `duration` time units. The blow-up guard compares against
 * the norm at the start of this call. On `EPLAB_STATUS_BLOW_UP` the
 * simulation holds the state that tripped the guard, or the last finite
 * state if a stage went non-finite.
 *
 * # Safety
 * `sim` must be live.
 */
enum EplabStatus eplab_simulation_advance(struct EplabSimulation *sim, double duration);

/**
 * Current simulation time; NaN for a null simulation.
 *
 * # Safety
 * `sim` must be null or live.
 */
double eplab_simulation_time(const struct EplabSimulation *sim);

/**
 * Copy of the current field, owned by the caller.
 *
 * # Safety
 * `sim` must be live; `out` writable.
 */
enum EplabStatus eplab_simulation_field(const struct EplabSimulation *sim, struct EplabField **out);

/**
 * # Safety
 * `sim` must be null or come from [`eplab_simulation_new`] and not be freed
 * twice.
 */
void eplab_simulation_free(struct EplabSimulation *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPLAB_H */
