#ifndef IAK_H
#define IAK_H

#include <stdbool.h>
#include <stddef.h>

/**
 * Status codes. `IAK_STATUS_OK` is zero.
 */
typedef enum IakStatus {
  IAK_STATUS_OK = 0,
  IAK_STATUS_NULL_POINTER = 1,
  IAK_STATUS_INVALID_INPUT = 2,
  IAK_STATUS_PARSE = 3,
  IAK_STATUS_IO = 4,
  IAK_STATUS_BUDGET_EXCEEDED = 5,
  IAK_STATUS_NO_POINT_ACTION = 6,
  IAK_STATUS_MISSING_ASSERTION = 7,
  IAK_STATUS_SERIES_DIVERGES = 8,
  IAK_STATUS_INVARIANT_VIOLATED = 9,
  IAK_STATUS_PANIC = 10,
} IakStatus;

/**
 * Points stored row-major, `dim` coordinates each.
 */
typedef struct IakCloud IakCloud;

/**
 * Loaded scene.
 */
typedef struct IakScene IakScene;

/**
 * Finite-scale box-dimension sandwich for a scene's `F_C`.
 */
typedef struct IakBoundsReport {
  double lower;
  double upper;
  double estimate;
  double homogeneous_estimate;
  double upper_lipschitz;
  double slack;
  double r_squared;
  bool holds;
} IakBoundsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *iak_last_error_message(void);

/**
 * Loads a scene file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum IakStatus iak_scene_load(const char *path, struct IakScene **out);

/**
 * Parses a scene from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum IakStatus iak_scene_from_json(const char *json, struct IakScene **out);

/**
 * # Safety
 * `scene` must come from a scene constructor and not be freed twice. Null is
 * ignored.
 */
void iak_scene_free(struct IakScene *scene);

/**
 * Number of load-time warnings, such as a violated open-set assertion.
 *
 * # Safety
 * `scene` must be a live handle; `out` must be writable.
 */
enum IakStatus iak_scene_warning_count(const struct IakScene *scene, size_t *out);

/**
 * Root of `Σ r_i^s = 1`; similarity systems only.
 *
 * # Safety
 * `scene` must be a live handle; `out` must be writable.
 */
enum IakStatus iak_similarity_dimension(const struct IakScene *scene, double *out);

/**
 * Last value of the doubling chain `s_1, s_2, s_4, …` within the scene's
 * word budget. `converged` is optional.
 *
 * # Safety
 * `scene` must be a live handle; `out` must be writable; `converged` may be
 * null.
 */
enum IakStatus iak_upper_lipschitz_dimension(const struct IakScene *scene,
                                             double tol,
                                             double *out,
                                             bool *converged);

/**
 * Root of `Σ_{|w|=k} Lip⁺(S_w)^t = 1`.
 *
 * # Safety
 * `scene` must be a live handle; `out` must be writable.
 */
enum IakStatus iak_solve_s_k(const struct IakScene *scene, size_t k, double tol, double *out);

/**
 * `Σ_{|w|=k} Lip⁺(S_w)^t`.
 *
 * # Safety
 * `scene` must be a live handle; `out` must be writable.
 */
enum IakStatus iak_partition_sum(const struct IakScene *scene, size_t k, double t, double *out);

/**
 * `q/(1−q)` with `q = Σ_i Lip⁺(S_i)^t`.
 *
 * # Safety
 * `scene` must be a live handle; `out` must be writable.
 */
enum IakStatus iak_b_t_constant(const struct IakScene *scene, double t, double *out);

/**
 * Number of words in the δ-stopping.
 *
 * # Safety
 * `scene` must be a live handle; `out` must be writable.
 */
enum IakStatus iak_stopping_count(const struct IakScene *scene, double delta, size_t *out);

/**
 * Box-dimension sandwich on the scene's ladder. A negative `slack` keeps
 * the scene's own.
 *
 * # Safety
 * `scene` must be a live handle; `out` must be writable.
 */
enum IakStatus iak_verify_bounds(const struct IakScene *scene,
                                 double slack,
                                 struct IakBoundsReport *out);

/**
 * `H^d(C)·(1 + Σ_k (Σ_i r_i^d)^k)` from the Hausdorff value declared on C.
 * Writes infinity when the series diverges.
 *
 * # Safety
 * `scene` must be a live handle; `out` must be writable.
 */
enum IakStatus iak_closed_form_measure(const struct IakScene *scene, double *out);

/**
 * Rasterised area of the orbital set over the area of C, with the closed
 * ratio `1/(1 − Σ|det A_i|)` alongside.
 *
 * # Safety
 * `scene` must be a live handle; `ratio` and `closed` must be writable.
 */
enum IakStatus iak_empirical_ratio(const struct IakScene *scene,
                                   size_t resolution,
                                   double *ratio,
                                   double *closed);

/**
 * One point per δ-stopping cylinder of the homogeneous attractor.
 *
 * # Safety
 * `scene` must be a live handle; `out` must be writable.
 */
enum IakStatus iak_homogeneous_points(const struct IakScene *scene,
                                      double delta,
                                      struct IakCloud **out);

/**
 * Number of points; zero for null.
 *
 * # Safety
 * `cloud` must be a live handle or null.
 */
size_t iak_cloud_len(const struct IakCloud *cloud);

/**
 * Coordinates per point; zero for null.
 *
 * # Safety
 * `cloud` must be a live handle or null.
 */
size_t iak_cloud_dim(const struct IakCloud *cloud);

/**
 * `len·dim` coordinates, row-major, owned by the cloud.
 *
 * # Safety
 * `cloud` must be a live handle or null.
 */
const double *iak_cloud_data(const struct IakCloud *cloud);

/**
 * # Safety
 * `cloud` must come from a cloud constructor and not be freed twice. Null is
 * ignored.
 */
void iak_cloud_free(struct IakCloud *cloud);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IAK_H */
