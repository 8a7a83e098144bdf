#ifndef GROUNDSCOPE_H
#define GROUNDSCOPE_H

/* Generated by cbindgen from groundscope-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every entry point.
typedef enum GsStatus {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_POINTER = 1,
  GS_STATUS_INVALID_INTERVAL = 2,
  GS_STATUS_EMPTY_INPUT = 3,
  GS_STATUS_OUT_OF_RANGE = 4,
  GS_STATUS_DIMENSION_MISMATCH = 5,
  GS_STATUS_NON_FINITE = 6,
  GS_STATUS_UTF8 = 7,
  GS_STATUS_INTERNAL = 8,
} GsStatus;

// Opaque grounding session over one video's feature matrix.
typedef struct GsGrounder GsGrounder;

// A closed time span in seconds.
typedef struct GsInterval {
  double start_s;
  double end_s;
} GsInterval;

// Grounding knobs; `margin = UINT64_MAX` pads the window to the full
// timeline.
typedef struct GsEngineConfig {
  size_t pool_factor;
  double theta;
  double delta;
  uint64_t margin;
} GsEngineConfig;

// Result of one grounding run.
typedef struct GsGroundingOutput {
  // Stage-1 window (full timeline in single-stage mode).
  struct GsInterval window;
  // Final predicted interval.
  struct GsInterval interval;
  // Visual entries scored in stage 1 (0 in single-stage mode).
  size_t stage1_tokens;
  // Visual entries scored in stage 2.
  size_t stage2_tokens;
  // True when every coarse super-group scored equal and the window
  // defaulted to the full timeline.
  bool degenerate;
} GsGroundingOutput;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Intersection-over-union of two intervals.
//
// # Safety
// `out` must point to writable memory for one `f64`.
enum GsStatus gs_iou(struct GsInterval a, struct GsInterval b, double *out);

// Arithmetic mean of `len` IoU scores in `[0, 1]`.
//
// # Safety
// `scores` must point to `len` readable `f64`; `out` must be writable.
enum GsStatus gs_mean_iou(const double *scores, size_t len, double *out);

// Fraction of `len` IoU scores at or above `tau`.
//
// # Safety
// `scores` must point to `len` readable `f64`; `out` must be writable.
enum GsStatus gs_recall_at(const double *scores, size_t len, double tau, double *out);

// Normalized temporal position of an interval's midpoint in its video.
//
// # Safety
// `out` must be writable.
enum GsStatus gs_query_center(struct GsInterval gt, double video_duration_s, double *out);

// Half-open bin index for a center in `[0, 1]`; the last bin is closed.
//
// # Safety
// `out` must be writable.
enum GsStatus gs_center_bin(double center, size_t bins, size_t *out);

// Sample standard deviation (divisor n-1) of `len` recall values.
//
// # Safety
// `values` must point to `len` readable `f64`; `out` must be writable.
enum GsStatus gs_position_dispersion(const double *values, size_t len, double *out);

// Relative best-worst gap `(max - min) / max` as a percentage.
//
// # Safety
// `values` must point to `len` readable `f64`; `out` must be writable.
enum GsStatus gs_position_gap(const double *values, size_t len, double *out);

// Grows an interval to at least `min_len_s` about its midpoint, sliding to
// stay inside `[0, duration_s]`.
//
// # Safety
// `out` must point to writable memory for one `GsInterval`.
enum GsStatus gs_extend_interval(struct GsInterval interval,
                                 double min_len_s,
                                 double duration_s,
                                 struct GsInterval *out);

// Midpoint-uniform frame times: writes `budget` values into `out_times`.
//
// # Safety
// `out_times` must point to writable memory for `budget` `f64`.
enum GsStatus gs_uniform_frames(struct GsInterval interval, size_t budget, double *out_times);

// Deterministic unit embedding for a query text: writes `dim` values into
// `out`.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must hold `dim` `f64`.
enum GsStatus gs_query_embedding_from_text(const char *text, size_t dim, double *out);

// Creates a grounding session over a row-major feature matrix of
// `n_frames x dim` at `fps`, with frame times starting at `t0_s`. Returns
// null on invalid input.
//
// # Safety
// `features` must point to `n_frames * dim` readable `f64`.
struct GsGrounder *gs_grounder_new(const double *features,
                                   size_t n_frames,
                                   size_t dim,
                                   double fps,
                                   double t0_s,
                                   size_t group_size);

// Frees a grounding session. Passing null is a no-op.
//
// # Safety
// `handle` must have come from `gs_grounder_new` and not been freed.
void gs_grounder_free(struct GsGrounder *handle);

// Runs progressive (or single-stage) grounding for one query embedding
// against the session's video using the built-in inner-product scorer.
//
// # Safety
// `handle` must be a live session, `query_embedding` must hold `dim`
// readable `f64`, and `out` must be writable.
enum GsStatus gs_grounder_run(const struct GsGrounder *handle,
                              const double *query_embedding,
                              size_t dim,
                              bool progressive,
                              struct GsEngineConfig config,
                              struct GsGroundingOutput *out);

// Static description of a status code.
const char *gs_status_message(enum GsStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GROUNDSCOPE_H */
