#ifndef CAPILLARY_PENROSE_H
#define CAPILLARY_PENROSE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_POINTER = 1,
  CP_STATUS_INVALID_ARGUMENT = 2,
  CP_STATUS_NON_CONVERGENCE = 3,
  CP_STATUS_DEGENERATE = 4,
  CP_STATUS_NUMERICAL = 5,
  CP_STATUS_PANIC = 6,
} CpStatus;

/**
 * Support surface handle.
 */
typedef struct CpSupport CpSupport;

/**
 * Result of a continuation sweep.
 */
typedef struct CpSweep CpSweep;

typedef struct CpCatenoidQuantities {
  double m;
  double height;
  double disk_radius;
  double disk_area;
  double band_area;
  double contact_cosine;
  double free_energy_mass;
  double profile_convexity;
} CpCatenoidQuantities;

typedef struct CpSweepRecord {
  double t;
  double area;
  double lateral_area;
  double mf;
  double residual;
  double grad_norm;
  /**
   * NaN when not computed.
   */
  double kappa;
  size_t components;
  double min_radius;
  size_t iters;
} CpSweepRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *cp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cp_version(void);

/**
 * Closed-form flat disk data at `height` inside the half-catenoid of mass `m`.
 *
 * # Safety
 * `out` must be NULL or point to writable memory for one `CpCatenoidQuantities`.
 */
enum CpStatus cp_catenoid_exact(double m, double height, struct CpCatenoidQuantities *out);

/**
 * The plane `x₃ = 0`.
 *
 * # Safety
 * `out` must be NULL or a valid pointer to a handle slot.
 */
enum CpStatus cp_support_plane(struct CpSupport **out);

/**
 * Half-catenoid of mass `m` closed by a cap of depth `cap_depth`.
 *
 * # Safety
 * `out` must be NULL or a valid pointer to a handle slot.
 */
enum CpStatus cp_support_catenoid(double m, double cap_depth, struct CpSupport **out);

/**
 * Neck of radius `neck` whose mean curvature is the sum of `n` bumps given
 * as parallel arrays.
 *
 * # Safety
 * The three arrays must hold `n` values each; `out` must be a valid handle slot.
 */
enum CpStatus cp_support_curvature_bump(double neck,
                                        double cap_depth,
                                        const double *centers,
                                        const double *widths,
                                        const double *amplitudes,
                                        size_t n,
                                        struct CpSupport **out);

/**
 * # Safety
 * `support` must be NULL or a handle from a `cp_support_*` constructor, not yet freed.
 */
void cp_support_free(struct CpSupport *support);

/**
 * Extrapolated exterior mass from `n ≥ 3` increasing radii.
 *
 * # Safety
 * `support` must be a live handle, `radii` must hold `n` values and `mass` must be writable.
 */
enum CpStatus cp_exterior_mass(const struct CpSupport *support,
                               const double *radii,
                               size_t n,
                               double *mass);

/**
 * Continuation sweep over `0, t_step, …, t_max` from the default seed with
 * `rings` rings. On non-convergence the partial sweep is still returned in
 * `out` together with `CP_STATUS_NON_CONVERGENCE`.
 *
 * # Safety
 * `support` must be a live handle and `out` a valid handle slot.
 */
enum CpStatus cp_sweep_run(const struct CpSupport *support,
                           double t_max,
                           double t_step,
                           size_t rings,
                           struct CpSweep **out);

/**
 * Number of records; 0 for NULL.
 *
 * # Safety
 * `sweep` must be NULL or a live handle.
 */
size_t cp_sweep_len(const struct CpSweep *sweep);

/**
 * # Safety
 * `sweep` must be a live handle and `out` writable.
 */
enum CpStatus cp_sweep_record(const struct CpSweep *sweep, size_t index, struct CpSweepRecord *out);

/**
 * The sweep as CSV text; release with `cp_string_free`. NULL on failure.
 *
 * # Safety
 * `sweep` must be NULL or a live handle.
 */
char *cp_sweep_csv(const struct CpSweep *sweep);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void cp_string_free(char *s);

/**
 * # Safety
 * `sweep` must be NULL or a handle from `cp_sweep_run`, not yet freed.
 */
void cp_sweep_free(struct CpSweep *sweep);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAPILLARY_PENROSE_H */
