#ifndef BSCC_H
#define BSCC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BsccStatus {
  BSCC_STATUS_OK = 0,
  BSCC_STATUS_NULL_POINTER = 1,
  BSCC_STATUS_INVALID_ARGUMENT = 2,
  // Too few nodes or survivors, or a straggler count out of range.
  BSCC_STATUS_INFEASIBLE = 3,
  // Singular system, overflow or a degenerate reference.
  BSCC_STATUS_NUMERICAL = 4,
  BSCC_STATUS_BUFFER_TOO_SMALL = 5,
  BSCC_STATUS_PANIC = 6,
} BsccStatus;

// Encoder selector for [`bscc_simulate_trial`].
typedef enum BsccEncoder {
  BSCC_ENCODER_LAGRANGE = 0,
  BSCC_ENCODER_BERRUT = 1,
} BsccEncoder;

// Fitted natural cubic spline. Create with [`bscc_spline_fit`], release
// with [`bscc_spline_free`].
typedef struct BsccSpline BsccSpline;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer is
// valid until the next `bscc_*` call on the same thread.
const char *bscc_last_error_message(void);

// Static description of a [`BsccStatus`] value.
const char *bscc_status_string(int status);

const char *bscc_version(void);

// Number of degree-`degree` basis functions on the clamped knot vector
// built from `num_points` breakpoints.
size_t bscc_basis_count(size_t num_points, size_t degree);

// Writes all basis values at `z` (zeros outside the active range) into
// `out`, which must hold [`bscc_basis_count`] values.
//
// # Safety
// `points` must be valid for `num_points` reads and `out` for `out_len`
// writes.
enum BsccStatus bscc_basis_values(const double *points,
                                  size_t num_points,
                                  size_t degree,
                                  double z,
                                  double *out,
                                  size_t out_len);

// Fits a natural cubic spline through `num_channels` sample vectors at
// `num_nodes` strictly increasing nodes. `samples` is channel-major:
// channel `c` occupies `samples[c * num_nodes .. (c + 1) * num_nodes]`.
//
// # Safety
// `nodes` must be valid for `num_nodes` reads, `samples` for
// `num_nodes * num_channels` reads, and `out` for one write.
enum BsccStatus bscc_spline_fit(const double *nodes,
                                size_t num_nodes,
                                const double *samples,
                                size_t num_channels,
                                struct BsccSpline **out);

// # Safety
// `spline` must be null or a live handle from [`bscc_spline_fit`].
size_t bscc_spline_num_channels(const struct BsccSpline *spline);

// # Safety
// `spline` must be null or a live handle from [`bscc_spline_fit`].
size_t bscc_spline_num_coeffs(const struct BsccSpline *spline);

// Evaluates every channel at `z` into `out[0..num_channels]`.
//
// # Safety
// `spline` must be null or a live handle; `out` must be valid for
// `out_len` writes.
enum BsccStatus bscc_spline_eval(const struct BsccSpline *spline,
                                 double z,
                                 double *out,
                                 size_t out_len);

// Copies the B-spline coefficients of `channel` into `out`.
//
// # Safety
// `spline` must be null or a live handle; `out` must be valid for
// `out_len` writes.
enum BsccStatus bscc_spline_coefficients(const struct BsccSpline *spline,
                                         size_t channel,
                                         double *out,
                                         size_t out_len);

// # Safety
// `spline` must be null or a handle from [`bscc_spline_fit`] that has not
// been freed.
void bscc_spline_free(struct BsccSpline *spline);

// Berrut decoder bound for `n` workers and `s` stragglers.
//
// # Safety
// `out` must be valid for one write.
enum BsccStatus bscc_bacc_bound(size_t n, size_t s, double *out);

// Spline bound on second-kind Chebyshev points. A non-positive or NaN
// `h_min` selects the minimum Chebyshev spacing for `n`.
//
// # Safety
// `out` must be valid for one write.
enum BsccStatus bscc_cheby_bound(size_t n,
                                 size_t s,
                                 double c,
                                 double c1,
                                 double g4_sup,
                                 double h_min,
                                 double *out);

// Spline bound for arbitrary nodes with the given spacing extremes.
//
// # Safety
// `out` must be valid for one write.
enum BsccStatus bscc_corollary_bound(size_t n,
                                     size_t s,
                                     double c,
                                     double c1,
                                     double g4_sup,
                                     double h_min,
                                     double h_max,
                                     double *out);

// Runs one paired trial of the coded pipeline and writes the relative
// error of the spline (`out_bscc`) and Berrut (`out_bacc`) decoders.
// `encoder` is a [`BsccEncoder`] value; `function` names the target
// (`xsinx`, `sigmoid`, `sin`, `exp`, `identity`).
//
// # Safety
// `function` must be a NUL-terminated string; the outputs must be valid
// for one write each.
enum BsccStatus bscc_simulate_trial(size_t n,
                                    size_t k,
                                    size_t s,
                                    const char *function,
                                    int encoder,
                                    uint64_t seed,
                                    size_t trial,
                                    size_t block_rows,
                                    size_t block_cols,
                                    double *out_bscc,
                                    double *out_bacc);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BSCC_H */
