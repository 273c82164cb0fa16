#ifndef CACHESIEVE_H
#define CACHESIEVE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_L_OUT_OF_RANGE = 1,
  CS_STATUS_F_ZERO_OR_OVERLAP = 2,
  CS_STATUS_OVERFLOW = 3,
  CS_STATUS_INDEX_OUT_OF_RANGE = 4,
  CS_STATUS_NOT_ADMISSIBLE = 5,
  CS_STATUS_ALLOC_LIMIT = 6,
  CS_STATUS_LIMIT_TOO_LARGE = 7,
  CS_STATUS_RANGE_TOO_LARGE = 8,
  CS_STATUS_IO_ERROR = 9,
  CS_STATUS_NULL_POINTER = 10,
  CS_STATUS_BUFFER_TOO_SMALL = 11,
  CS_STATUS_INVALID_ARGUMENT = 12,
  /**
   * All segments have been produced.
   */
  CS_STATUS_DONE = 13,
  CS_STATUS_PANIC = 14,
} CsStatus;

/**
 * Opaque sieve run.
 */
typedef struct CsSieve CsSieve;

/**
 * Validated parameters and the derived interval `[u, v]`.
 */
typedef struct CsParams {
  uint32_t log_segment;
  uint64_t first_segment;
  uint64_t segments;
  uint64_t u;
  uint64_t v;
  /**
   * Bytes per segment in the packed table.
   */
  uint64_t segment_bytes;
  uint64_t table_bytes;
} CsParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *cs_last_error(void);

/**
 * Checks `(l, f, n)` and fills `out` with the derived interval.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `CsParams`.
 */
enum CsStatus cs_validate_params(uint32_t log_segment,
                                 uint64_t first_segment,
                                 uint64_t segments,
                                 bool test_mode,
                                 struct CsParams *out);

/**
 * First segment index for an interval of `segments` segments centred near `10^e`.
 *
 * # Safety
 * `first_out` must point to writable memory for one `u64`.
 */
enum CsStatus cs_params_from_midpoint(uint32_t e,
                                      uint32_t log_segment,
                                      uint64_t segments,
                                      uint64_t *first_out);

/**
 * Builds the base for a run and returns a handle in `*out`.
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
enum CsStatus cs_sieve_new(uint32_t log_segment,
                           uint64_t first_segment,
                           uint64_t segments,
                           bool test_mode,
                           struct CsSieve **out);

/**
 * Releases a handle from [`cs_sieve_new`]. Null is ignored.
 *
 * # Safety
 * `sieve` must be null or a handle not yet freed.
 */
void cs_sieve_free(struct CsSieve *sieve);

/**
 * Parameters of a run.
 *
 * # Safety
 * `sieve` must be a live handle and `out` writable.
 */
enum CsStatus cs_sieve_params(const struct CsSieve *sieve, struct CsParams *out);

/**
 * Sieves the next segment and copies its packed bits (LSB first) into
 * `buf`, which must hold `segment_bytes` bytes. Returns `CS_STATUS_DONE`
 * once every segment has been produced.
 *
 * # Safety
 * `sieve` must be a live handle; `buf` must be writable for `len` bytes;
 * `index_out` may be null.
 */
enum CsStatus cs_sieve_next_segment(struct CsSieve *sieve,
                                    uint8_t *buf,
                                    size_t len,
                                    uint64_t *index_out);

/**
 * Number of primes in the interval.
 *
 * # Safety
 * `count_out` must be writable.
 */
enum CsStatus cs_count_primes(uint32_t log_segment,
                              uint64_t first_segment,
                              uint64_t segments,
                              bool test_mode,
                              uint64_t *count_out);

/**
 * Sieves the interval into `dir/erato_l{l}_f{f}_n{n}.bits` and copies the
 * NUL-terminated path into `path_out` (when non-null and large enough).
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `path_out` writable for `path_len` bytes.
 */
enum CsStatus cs_write_table(uint32_t log_segment,
                             uint64_t first_segment,
                             uint64_t segments,
                             bool test_mode,
                             const char *dir,
                             char *path_out,
                             size_t path_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CACHESIEVE_H */
