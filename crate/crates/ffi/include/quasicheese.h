#ifndef QUASICHEESE_H
#define QUASICHEESE_H

#include <stdbool.h>
#include <stddef.h>

typedef enum QcStatus {
  QC_STATUS_OK = 0,
  QC_STATUS_NULL_POINTER = 1,
  QC_STATUS_INVALID_ARGUMENT = 2,
  QC_STATUS_MALFORMED = 3,
  QC_STATUS_IO = 4,
  QC_STATUS_VERIFICATION_FAILED = 5,
  QC_STATUS_POLE = 6,
  QC_STATUS_INTERNAL = 7,
} QcStatus;

/**
 * Opaque cheese handle.
 */
typedef struct QcCheese QcCheese;

/**
 * Opaque handle for a finished construction and its verification.
 */
typedef struct QcConstruction QcConstruction;

/**
 * Opaque rational function handle.
 */
typedef struct QcRational QcRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *qc_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void qc_string_free(char *s);

/**
 * New cheese with the given outer disk and no holes.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QcStatus qc_cheese_new(double cx,
                            double cy,
                            double radius,
                            double tail_bound,
                            struct QcCheese **out);

/**
 * Parses a cheese document (UTF-8 JSON).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QcStatus qc_cheese_from_json(const char *json, struct QcCheese **out);

/**
 * # Safety
 * `cheese` must be a live handle or null.
 */
void qc_cheese_free(struct QcCheese *cheese);

/**
 * Appends a hole.
 *
 * # Safety
 * `cheese` must be a live handle.
 */
enum QcStatus qc_cheese_add_hole(struct QcCheese *cheese, double cx, double cy, double radius);

/**
 * # Safety
 * `cheese` must be a live handle or null (gives 0).
 */
size_t qc_cheese_hole_count(const struct QcCheese *cheese);

/**
 * Sum of the hole radii plus the tail bound.
 *
 * # Safety
 * `cheese` must be a live handle and `out` a valid pointer.
 */
enum QcStatus qc_cheese_rho(const struct QcCheese *cheese, double *out);

/**
 * Classicality with the given strictness; the worst margin is optional.
 *
 * # Safety
 * `cheese` must be a live handle, `classical` valid, `margin` valid or null.
 */
enum QcStatus qc_cheese_is_classical(const struct QcCheese *cheese,
                                     double strictness_tol,
                                     bool *classical,
                                     double *margin);

/**
 * Membership of each point `(xs[i], ys[i])`.
 *
 * # Safety
 * `xs`, `ys` and `out` must hold `len` elements.
 */
enum QcStatus qc_cheese_contains(const struct QcCheese *cheese,
                                 const double *xs,
                                 const double *ys,
                                 size_t len,
                                 bool *out);

/**
 * Cheese document as JSON; free with [`qc_string_free`].
 *
 * # Safety
 * `cheese` must be a live handle and `out` a valid pointer.
 */
enum QcStatus qc_cheese_to_json(const struct QcCheese *cheese, char **out);

/**
 * Runs the annulus construction. A handle is returned even when a
 * verification clause fails; check [`qc_construction_passed`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QcStatus qc_construction_build(double r,
                                    double eps,
                                    double delta,
                                    size_t k_probe,
                                    struct QcConstruction **out);

/**
 * # Safety
 * `c` must be a live handle or null.
 */
void qc_construction_free(struct QcConstruction *c);

/**
 * # Safety
 * `c` must be a live handle or null (gives false).
 */
bool qc_construction_passed(const struct QcConstruction *c);

/**
 * Copy of the constructed cheese as a separate handle.
 *
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum QcStatus qc_construction_cheese(const struct QcConstruction *c, struct QcCheese **out);

/**
 * Rational function from ascending coefficient arrays (real and imaginary
 * parts separately).
 *
 * # Safety
 * Each coefficient array must hold its stated length; `out` must be valid.
 */
enum QcStatus qc_rational_new(const double *num_re,
                              const double *num_im,
                              size_t num_len,
                              const double *den_re,
                              const double *den_im,
                              size_t den_len,
                              struct QcRational **out);

/**
 * # Safety
 * `f` must be a live handle or null.
 */
void qc_rational_free(struct QcRational *f);

/**
 * `f(z), f'(z), ..., f^(order)(z)` into `out_re` / `out_im` (`order + 1` slots).
 *
 * # Safety
 * `f` must be a live handle and both buffers must hold `order + 1` values.
 */
enum QcStatus qc_rational_jet(const struct QcRational *f,
                              double x,
                              double y,
                              size_t order,
                              double *out_re,
                              double *out_im);

/**
 * Upper bound for `max B_{j,k}` over `j < k <= k_max`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QcStatus qc_cohen_max_b(double alpha, size_t k_max, double *out);

/**
 * Whether `max B < 1/2` and the sums `lemma_sum(alpha, n)` stay below 2 up to `k_max`.
 *
 * # Safety
 * `passed` must be a valid pointer.
 */
enum QcStatus qc_cohen_verify(double alpha, size_t k_max, bool *passed);

/**
 * `sum_{n=1}^{horizon} M_n^{-1/n}` for a named family such as `"factorial"`.
 *
 * # Safety
 * `family` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QcStatus qc_dc_root_sum(const char *family, size_t horizon, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QUASICHEESE_H */
