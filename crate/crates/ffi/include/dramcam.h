#ifndef DRAMCAM_H
#define DRAMCAM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DramcamStatus {
  DRAMCAM_STATUS_OK = 0,
  DRAMCAM_STATUS_NULL_POINTER = 1,
  DRAMCAM_STATUS_INVALID_UTF8 = 2,
  DRAMCAM_STATUS_BUFFER_TOO_SMALL = 3,
  DRAMCAM_STATUS_PANIC = 5,
  DRAMCAM_STATUS_ADDRESS = 10,
  DRAMCAM_STATUS_PROTOCOL = 11,
  DRAMCAM_STATUS_TIMING = 12,
  DRAMCAM_STATUS_LENGTH = 13,
  DRAMCAM_STATUS_CONSTRAINT = 14,
  DRAMCAM_STATUS_NO_OPEN_ROW = 15,
  DRAMCAM_STATUS_SELF_COPY = 16,
  DRAMCAM_STATUS_LAYOUT = 17,
  DRAMCAM_STATUS_ENCODING = 18,
  DRAMCAM_STATUS_MODE = 19,
  DRAMCAM_STATUS_EMPTY_TRACE = 20,
  DRAMCAM_STATUS_EMPTY_DATABASE = 21,
  DRAMCAM_STATUS_PARSE = 22,
  DRAMCAM_STATUS_CONFIG = 23,
  DRAMCAM_STATUS_ZERO_LATENCY = 24,
  DRAMCAM_STATUS_IO = 25,
} DramcamStatus;

// Array modes for [`dramcam_cam_new`].
typedef enum DramcamMode {
  DRAMCAM_MODE_NAND = 0,
  DRAMCAM_MODE_NOR = 1,
} DramcamMode;

// Search kinds for [`dramcam_cam_search`].
typedef enum DramcamSearchKind {
  DRAMCAM_SEARCH_KIND_NAND = 0,
  DRAMCAM_SEARCH_KIND_NOR = 1,
  DRAMCAM_SEARCH_KIND_TCAM = 2,
  DRAMCAM_SEARCH_KIND_HD1 = 3,
} DramcamSearchKind;

// Opaque CAM array handle.
typedef struct DramcamCam DramcamCam;

// Opaque subarray handle.
typedef struct DramcamSubarray DramcamSubarray;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent failure on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *dramcam_last_error(void);

// Library version as a static NUL-terminated string.
const char *dramcam_version(void);

// Creates a subarray with default DDR3-1600 timing.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum DramcamStatus dramcam_subarray_new(size_t rows, size_t cols, struct DramcamSubarray **out);

// # Safety
// `h` must come from [`dramcam_subarray_new`] and not be used afterwards.
void dramcam_subarray_free(struct DramcamSubarray *h);

// Host write of `len` cells into row `row`.
//
// # Safety
// `h` must be a live handle and `bits` must point to `len` readable bytes.
enum DramcamStatus dramcam_subarray_write_row(struct DramcamSubarray *h,
                                              size_t row,
                                              const uint8_t *bits,
                                              size_t len);

// Executes a trace given as text (`ACT <row> gap=<ps>` / `PRE gap=<ps>`).
//
// # Safety
// `h` must be a live handle and `trace` a NUL-terminated string.
enum DramcamStatus dramcam_subarray_execute(struct DramcamSubarray *h, const char *trace);

// Copies the open row buffer into `out` (`cols` bytes).
//
// # Safety
// `h` must be a live handle and `out` must point to `len` writable bytes.
enum DramcamStatus dramcam_subarray_read_row_buffer(struct DramcamSubarray *h,
                                                    uint8_t *out,
                                                    size_t len);

// Current simulated time in picoseconds, or 0 for a null handle.
//
// # Safety
// `h` must be null or a live handle.
uint64_t dramcam_subarray_clock_ps(const struct DramcamSubarray *h);

// Creates a CAM array for `word_bits`-bit words on one subarray of
// `rows` x `cols` cells.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum DramcamStatus dramcam_cam_new(size_t rows,
                                   size_t cols,
                                   size_t word_bits,
                                   enum DramcamMode mode,
                                   struct DramcamCam **out);

// # Safety
// `h` must come from [`dramcam_cam_new`] and not be used afterwards.
void dramcam_cam_free(struct DramcamCam *h);

// Stores newline-separated words of `0`, `1` and `X`, one per column.
//
// # Safety
// `h` must be a live handle and `words` a NUL-terminated string.
enum DramcamStatus dramcam_cam_store(struct DramcamCam *h, const char *words);

// Number of stored words, or 0 for a null handle.
//
// # Safety
// `h` must be null or a live handle.
size_t dramcam_cam_word_count(const struct DramcamCam *h);

// Runs one compare. `query` is a bitstring, optionally followed by a space
// and a mask bitstring (1 = compare) for TCAM searches. Writes one verdict
// byte per stored word to `out` and sets `match_is_one` to 1 if a 1 verdict
// means match, 0 if a 0 verdict does.
//
// # Safety
// `h` must be a live handle, `query` a NUL-terminated string, `out` must
// point to `len` writable bytes and `match_is_one` to one writable byte.
enum DramcamStatus dramcam_cam_search(struct DramcamCam *h,
                                      const char *query,
                                      enum DramcamSearchKind kind,
                                      uint8_t *out,
                                      size_t len,
                                      uint8_t *match_is_one);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRAMCAM_H */
