#ifndef MOYAL_VORTEX_H
#define MOYAL_VORTEX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MvStatus {
  MV_STATUS_OK = 0,
  MV_STATUS_NULL_POINTER = 1,
  MV_STATUS_INVALID_ARGUMENT = 2,
  MV_STATUS_GRID_MISMATCH = 3,
  MV_STATUS_NUMERICAL = 4,
  MV_STATUS_BUFFER_TOO_SMALL = 5,
  MV_STATUS_PANIC = 6,
} MvStatus;

typedef enum MvVariant {
  MV_VARIANT_CHARGE1_QUADRATIC = 0,
  MV_VARIANT_CHARGEM_EQUISPACED = 1,
} MvVariant;

/**
 * Opaque complex field on a grid.
 */
typedef struct MvField MvField;

/**
 * Opaque uniform grid.
 */
typedef struct MvGrid MvGrid;

/**
 * Coherent-state vortex parameters.
 */
typedef struct MvVortexParams {
  double a;
  double omega;
  double radius;
  double velocity;
  double sigma;
  uint32_t m;
} MvVortexParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *mv_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mv_version(void);

/**
 * Creates an `n × n` grid on `[-half_width, half_width)²`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum MvStatus mv_grid_new(size_t n, double half_width, struct MvGrid **out);

/**
 * # Safety
 * `grid` must come from [`mv_grid_new`] and not be freed twice. Null is ignored.
 */
void mv_grid_free(struct MvGrid *grid);

/**
 * # Safety
 * `field` must come from this library and not be freed twice. Null is ignored.
 */
void mv_field_free(struct MvField *field);

/**
 * Copies `len = 2 n²` interleaved doubles into a new field.
 *
 * # Safety
 * `data` must be valid for `len` reads and `out` for writes.
 */
enum MvStatus mv_field_from_interleaved(const struct MvGrid *grid,
                                        const double *data,
                                        size_t len,
                                        struct MvField **out);

/**
 * Writes the field as `2 n²` interleaved doubles into `out[..capacity]`.
 *
 * # Safety
 * `out` must be valid for `capacity` writes.
 */
enum MvStatus mv_field_to_interleaved(const struct MvField *field, double *out, size_t capacity);

/**
 * Side length `n` of the field's grid.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum MvStatus mv_field_grid_n(const struct MvField *field, size_t *out);

/**
 * The projector symbol `φₙ` at Θ = 1.
 *
 * # Safety
 * `grid` must be a live handle and `out` valid for writes.
 */
enum MvStatus mv_phi_n(const struct MvGrid *grid, size_t n, struct MvField **out);

/**
 * # Safety
 * `grid` must be a live handle, `params` readable and `out` valid for writes.
 */
enum MvStatus mv_ansatz_build(const struct MvGrid *grid,
                              const struct MvVortexParams *params,
                              struct MvField **out);

/**
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum MvStatus mv_ansatz_fit(const struct MvField *field, struct MvVortexParams *out);

/**
 * `u ⋆ v` at the given Θ.
 *
 * # Safety
 * `u`, `v` must be live handles and `out` valid for writes.
 */
enum MvStatus mv_star(const struct MvField *u,
                      const struct MvField *v,
                      double theta_,
                      struct MvField **out);

/**
 * `u ⋆ ū ⋆ u` at the given Θ.
 *
 * # Safety
 * `u` must be a live handle and `out` valid for writes.
 */
enum MvStatus mv_star_cubic(const struct MvField *u, double theta_, struct MvField **out);

/**
 * `∫|u|² dx`.
 *
 * # Safety
 * `u` must be a live handle and `out` valid for writes.
 */
enum MvStatus mv_power(const struct MvField *u, double *out);

/**
 * Model energy at the given Θ.
 *
 * # Safety
 * `u` must be a live handle and `out` valid for writes.
 */
enum MvStatus mv_energy(const struct MvField *u, double theta_, double *out);

/**
 * One integrating-factor RK4 step of length `dt`.
 *
 * # Safety
 * `u` must be a live handle and `out` valid for writes.
 */
enum MvStatus mv_nls_step(const struct MvField *u, double dt, double theta_, struct MvField **out);

/**
 * Winding number on the circle of radius `r0`.
 *
 * # Safety
 * `u` must be a live handle and `out` valid for writes.
 */
enum MvStatus mv_winding_number(const struct MvField *u, double r0, int32_t *out);

/**
 * Peierls–Nabarro potential `F(R)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum MvStatus mv_pn_potential(double r,
                              double omega,
                              double v,
                              double theta_,
                              enum MvVariant variant,
                              double *out);

/**
 * Amplitude–width relation `a(ω)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum MvStatus mv_amplitude_width(double omega, double theta_, double *out);

/**
 * The first `n_max` fixed-point radii into `radii[..n_max]`, with
 * `stable[i]` set to 1 for stable points and 0 otherwise.
 *
 * # Safety
 * `radii` and `stable` must be valid for `n_max` writes.
 */
enum MvStatus mv_fixed_points(double theta_,
                              size_t n_max,
                              enum MvVariant variant,
                              double *radii,
                              uint8_t *stable);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOYAL_VORTEX_H */
