#ifndef APGAPS_H
#define APGAPS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ApgStatus {
  APG_STATUS_OK = 0,
  // Argument outside the domain of the operation, or an invalid residue class.
  APG_STATUS_INVALID_ARGUMENT = 1,
  // A required pointer was null.
  APG_STATUS_NULL_POINTER = 2,
  // The sieve budget would be exceeded.
  APG_STATUS_BUDGET_EXCEEDED = 3,
  // Index past the end of a result set.
  APG_STATUS_OUT_OF_RANGE = 4,
  // Overflow, non-convergence, I/O or other failure while computing.
  APG_STATUS_COMPUTATION = 5,
  // A Rust panic was caught at the boundary.
  APG_STATUS_PANIC = 6,
} ApgStatus;

// Opaque result of a gap scan.
typedef struct ApgScan ApgScan;

typedef struct ApgGapEvent {
  uint64_t start_prime;
  uint64_t end_prime;
  uint64_t size;
  bool is_maximal;
  // 1-based index among maximal gaps, 0 when the gap is not maximal.
  uint64_t maximal_index;
  // 1-based index among first-occurrence gaps.
  uint64_t fo_index;
  double csg;
} ApgGapEvent;

typedef struct ApgGumbelFit {
  double scale;
  double mode;
  double ks;
} ApgGumbelFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer stays
// valid until the next apgaps call on the same thread.
const char *apg_last_error_message(void);

void apg_clear_last_error(void);

// Scans the class r mod q up to x_max on `threads` worker threads.
//
// # Safety
// `out` must be null or point to writable storage for one pointer.
enum ApgStatus apg_scan_create(uint64_t q,
                               uint64_t r,
                               uint64_t x_max,
                               uint32_t threads,
                               struct ApgScan **out);

// Number of events in a scan; 0 for a null handle.
//
// # Safety
// `scan` must be null or a live handle from [`apg_scan_create`].
size_t apg_scan_event_count(const struct ApgScan *scan);

// Number of maximal gaps in a scan; 0 for a null handle.
//
// # Safety
// `scan` must be null or a live handle from [`apg_scan_create`].
uint64_t apg_scan_maximal_count(const struct ApgScan *scan);

// Copies event `index` (in order of end prime) into `out`.
//
// # Safety
// `scan` must be null or a live handle; `out` must be null or writable.
enum ApgStatus apg_scan_get_event(const struct ApgScan *scan,
                                  size_t index,
                                  struct ApgGapEvent *out);

// Releases a scan handle. Null is ignored.
//
// # Safety
// `scan` must be null or a handle from [`apg_scan_create`] not yet freed.
void apg_scan_free(struct ApgScan *scan);

// # Safety
// `out` must be null or writable.
enum ApgStatus apg_totient(uint64_t q, uint64_t *out);

// # Safety
// `out` must be null or writable.
enum ApgStatus apg_log_integral(double x, double *out);

// Mean of S(d) over d = r + nq as num/den times 1/(twin prime constant), and its value.
//
// # Safety
// Each out pointer must be null or writable; all three are required.
enum ApgStatus apg_mean_singular_product(uint64_t q,
                                         uint64_t r,
                                         uint64_t *num,
                                         uint64_t *den,
                                         double *value);

// sqrt(d) e^sqrt(d / phi(q)); +inf when too large for a double.
//
// # Safety
// `out` must be null or writable.
enum ApgStatus apg_predict_first_occurrence(uint64_t d, uint64_t q, double *out);

// Maximum-likelihood Gumbel fit of `n` samples.
//
// # Safety
// `samples` must point to `n` readable doubles; `out` must be null or writable.
enum ApgStatus apg_fit_gumbel(const double *samples, size_t n, struct ApgGumbelFit *out);

// Sum of 1/p + 1/p' over consecutive primes p < p' <= x of r mod q with p' - p = d.
//
// # Safety
// `out` must be null or writable.
enum ApgStatus apg_brun_partial_sum(uint64_t d, uint64_t q, uint64_t r, uint64_t x, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APGAPS_H */
