#ifndef PIRPSI_H
#define PIRPSI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PirpsiStatus {
  PIRPSI_STATUS_OK = 0,
  PIRPSI_STATUS_NULL_POINTER = 1,
  PIRPSI_STATUS_INVALID_ARGUMENT = 2,
  PIRPSI_STATUS_UNSUPPORTED = 3,
  PIRPSI_STATUS_DECODE = 4,
  PIRPSI_STATUS_BUFFER_TOO_SMALL = 5,
  PIRPSI_STATUS_INTERNAL = 6,
} PirpsiStatus;

/**
 * Opaque code handle.
 */
typedef struct PirpsiCode PirpsiCode;

/**
 * Opaque message store handle.
 */
typedef struct PirpsiStore PirpsiStore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the code for demand `demand` with side information `si_a`, `si_b`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle. The
 * handle must be released with [`pirpsi_code_free`].
 */
enum PirpsiStatus pirpsi_code_build(uint8_t k,
                                    uint8_t demand,
                                    uint8_t si_a,
                                    uint8_t si_b,
                                    struct PirpsiCode **out);

/**
 * # Safety
 * `code` must be null or a handle from [`pirpsi_code_build`] not yet freed.
 */
void pirpsi_code_free(struct PirpsiCode *code);

/**
 * Number of codewords sent to database `db` (1 or 2).
 *
 * # Safety
 * `code` must be a live handle and `out` writable.
 */
enum PirpsiStatus pirpsi_code_codeword_count(const struct PirpsiCode *code,
                                             uint8_t db,
                                             uintptr_t *out);

/**
 * Writes the query text for `db` as a NUL-terminated string. `out_len`
 * receives the byte length including the terminator, also when the buffer
 * is too small.
 *
 * # Safety
 * `code` must be a live handle, `buf` writable for `cap` bytes, `out_len` writable.
 */
enum PirpsiStatus pirpsi_code_render(const struct PirpsiCode *code,
                                     uint8_t db,
                                     char *buf,
                                     uintptr_t cap,
                                     uintptr_t *out_len);

/**
 * A random store of `k` messages sized for the scheme, seeded for reproducibility.
 *
 * # Safety
 * `out` must be writable. Release the handle with [`pirpsi_store_free`].
 */
enum PirpsiStatus pirpsi_store_random(uint8_t k, uint64_t seed, struct PirpsiStore **out);

/**
 * Copies bit `index` (1-based) of message `msg` into `out`.
 *
 * # Safety
 * `store` must be a live handle and `out` writable.
 */
enum PirpsiStatus pirpsi_store_bit(const struct PirpsiStore *store,
                                   uint8_t msg,
                                   uint32_t index,
                                   uint8_t *out);

/**
 * # Safety
 * `store` must be null or a handle from [`pirpsi_store_random`] not yet freed.
 */
void pirpsi_store_free(struct PirpsiStore *store);

/**
 * Answers database `db`'s query from `store`.
 *
 * # Safety
 * Handles must be live; `out` writable for `cap` bytes; `out_len` writable.
 */
enum PirpsiStatus pirpsi_answer(const struct PirpsiCode *code,
                                const struct PirpsiStore *store,
                                uint8_t db,
                                uint8_t *out,
                                uintptr_t cap,
                                uintptr_t *out_len);

/**
 * Decodes the demand from both answers and the two side-information
 * messages (lower id first, `si_len` bits each).
 *
 * # Safety
 * Every input pointer must be readable for its stated length; `out` writable
 * for `cap` bytes; `out_len` writable.
 */
enum PirpsiStatus pirpsi_decode(const struct PirpsiCode *code,
                                const uint8_t *ans1,
                                uintptr_t len1,
                                const uint8_t *ans2,
                                uintptr_t len2,
                                const uint8_t *si_lo,
                                const uint8_t *si_hi,
                                uintptr_t si_len,
                                uint8_t *out,
                                uintptr_t cap,
                                uintptr_t *out_len);

/**
 * Runs the GF(2) span check; `out` receives 1 when the demand is recoverable.
 *
 * # Safety
 * `code` must be a live handle and `out` writable.
 */
enum PirpsiStatus pirpsi_oracle(const struct PirpsiCode *code, uint8_t *out);

/**
 * Rate of the scheme for `k` messages as a reduced fraction.
 *
 * # Safety
 * `num` and `den` must be writable.
 */
enum PirpsiStatus pirpsi_rate(uint8_t k, uint64_t *num, uint64_t *den);

/**
 * Static description of a status code.
 */
const char *pirpsi_status_str(int32_t status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PIRPSI_H */
