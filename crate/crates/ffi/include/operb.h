#ifndef OPERB_H
#define OPERB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OperbStatus {
  OPERB_STATUS_OK = 0,
  /**
   * A configuration value or enum discriminant is out of range.
   */
  OPERB_STATUS_INVALID_CONFIG = 1,
  /**
   * Input points are empty, non-finite, too many, or not increasing in time.
   */
  OPERB_STATUS_INVALID_DATA = 2,
  /**
   * The call was made in the wrong state, e.g. pushing after finish.
   */
  OPERB_STATUS_INVALID_STATE = 3,
  OPERB_STATUS_NULL_POINTER = 4,
  OPERB_STATUS_INTERNAL = 5,
} OperbStatus;

typedef enum OperbAlgorithm {
  OPERB_ALGORITHM_DP = 0,
  OPERB_ALGORITHM_OPW = 1,
  OPERB_ALGORITHM_FBQS = 2,
  OPERB_ALGORITHM_OPERB = 3,
  OPERB_ALGORITHM_OPERB_A = 4,
} OperbAlgorithm;

/**
 * Segments produced by a batch call.
 */
typedef struct OperbResult OperbResult;

/**
 * Streaming OPERB / OPERB-A encoder.
 */
typedef struct OperbStream OperbStream;

/**
 * Fitting parameters. Obtain defaults from [`operb_config_default`].
 */
typedef struct OperbConfig {
  double zeta;
  double gamma_m;
  /**
   * Bit `i` enables optimization `i + 1`; 31 enables all five.
   */
  uint8_t opts;
} OperbConfig;

typedef struct OperbPoint {
  double x;
  double y;
  double t;
} OperbPoint;

typedef struct OperbSegment {
  struct OperbPoint start;
  struct OperbPoint end;
  /**
   * Input points attributed to this segment.
   */
  uint64_t covered;
  /**
   * Index of the last input point covered.
   */
  uint64_t last_index;
  /**
   * The start is an interpolated patch point rather than an input point.
   */
  bool patched_start;
} OperbSegment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null if none.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *operb_last_error(void);

/**
 * Default configuration for error bound `zeta`: all optimizations, γm = π/3.
 */
struct OperbConfig operb_config_default(double zeta);

/**
 * Creates a streaming encoder; `lazy` selects OPERB-A.
 *
 * # Safety
 * `config` must point to a valid `OperbConfig` and `out` to writable storage.
 */
enum OperbStatus operb_stream_new(const struct OperbConfig *config,
                                  bool lazy,
                                  struct OperbStream **out);

/**
 * Feeds one point. Segments it closes are queued for [`operb_stream_drain`].
 *
 * # Safety
 * `stream` must come from [`operb_stream_new`] and not be freed.
 */
enum OperbStatus operb_stream_push(struct OperbStream *stream, double x, double y, double t);

/**
 * Ends the input and queues the remaining segments. Further pushes fail.
 *
 * # Safety
 * `stream` must come from [`operb_stream_new`] and not be freed.
 */
enum OperbStatus operb_stream_finish(struct OperbStream *stream);

/**
 * Number of queued segments.
 *
 * # Safety
 * `stream` must be null or come from [`operb_stream_new`].
 */
size_t operb_stream_ready(const struct OperbStream *stream);

/**
 * Moves up to `cap` queued segments into `buf` in output order and writes
 * the number moved to `written`.
 *
 * # Safety
 * `buf` must have room for `cap` segments; `written` must be writable.
 */
enum OperbStatus operb_stream_drain(struct OperbStream *stream,
                                    struct OperbSegment *buf,
                                    size_t cap,
                                    size_t *written);

/**
 * # Safety
 * `stream` must be null or come from [`operb_stream_new`], and is invalid afterwards.
 */
void operb_stream_free(struct OperbStream *stream);

/**
 * Simplifies `n` points with `algo`, an [`OperbAlgorithm`] value. The
 * baselines read only `config.zeta`.
 *
 * # Safety
 * `points` must hold `n` readable points; `config` and `out` must be valid.
 */
enum OperbStatus operb_simplify(uint32_t algo,
                                const struct OperbPoint *points,
                                size_t n,
                                const struct OperbConfig *config,
                                struct OperbResult **out);

/**
 * # Safety
 * `result` must be null or come from [`operb_simplify`].
 */
size_t operb_result_len(const struct OperbResult *result);

/**
 * Pointer to `operb_result_len` segments, valid until the result is freed.
 *
 * # Safety
 * `result` must be null or come from [`operb_simplify`].
 */
const struct OperbSegment *operb_result_segments(const struct OperbResult *result);

/**
 * Writes the anomalous-candidate and patch counts of an OPERB-A run.
 *
 * # Safety
 * `result` must come from [`operb_simplify`]; the outputs must be writable.
 */
enum OperbStatus operb_result_patching(const struct OperbResult *result,
                                       uint64_t *anomalous,
                                       uint64_t *patches);

/**
 * # Safety
 * `result` must be null or come from [`operb_simplify`], and is invalid afterwards.
 */
void operb_result_free(struct OperbResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPERB_H */
