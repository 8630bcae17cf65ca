#ifndef RELAY_DP_H
#define RELAY_DP_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum RdpStatus {
  RDP_STATUS_OK = 0,
  RDP_STATUS_NULL_POINTER = 1,
  RDP_STATUS_INVALID_ARGUMENT = 2,
  RDP_STATUS_CONFIG_ERROR = 3,
  RDP_STATUS_TOO_FEW_RELAYS = 4,
  RDP_STATUS_SHAPE_MISMATCH = 5,
  RDP_STATUS_BUDGET_EXCEEDED = 6,
  RDP_STATUS_BUFFER_TOO_SMALL = 7,
  RDP_STATUS_IO_ERROR = 8,
  RDP_STATUS_PANIC = 9,
} RdpStatus;

typedef enum RdpScheme {
  RDP_SCHEME_OPTIMAL = 0,
  RDP_SCHEME_EXHAUSTIVE = 1,
  RDP_SCHEME_GREEDY = 2,
  RDP_SCHEME_HOP_GREEDY = 3,
  RDP_SCHEME_DRS = 4,
} RdpScheme;

/*
 Relays chosen by a selector for one channel realization.
 */
typedef struct RdpAssignment RdpAssignment;

/*
 A validated network with its trellis state space.
 */
typedef struct RdpNetwork RdpNetwork;

/*
 Outage estimate of one scheme.
 */
typedef struct RdpOutageEstimate {
  uint64_t trials;
  uint64_t outage_count;
  double probability;
  double ci_low;
  double ci_high;
  double mean_time_ms;
  double mean_comparisons;
} RdpOutageEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *rdp_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *rdp_version(void);

/*
 Network with `n_pairs` pairs, `relays` relays per stage, `n_hops` hops
 over `distance_km`, and default channel parameters.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum RdpStatus rdp_network_new(uintptr_t n_pairs,
                               uintptr_t relays,
                               uintptr_t n_hops,
                               double distance_km,
                               struct RdpNetwork **out);

/*
 Network described by flat `key = value` text, the same format the
 command-line tool reads. Unset keys take the tool's defaults.

 # Safety
 `config` must be a NUL-terminated string; `out` must be writable.
 */
enum RdpStatus rdp_network_from_config(const char *config, struct RdpNetwork **out);

/*
 # Safety
 `net` must be NULL or a handle from this library not yet freed.
 */
void rdp_network_free(struct RdpNetwork *net);

/*
 Pair count, relays per stage (after padding), hops and trellis states
 per stage. Any output pointer may be NULL.

 # Safety
 `net` must be a live handle; non-NULL outputs must be writable.
 */
enum RdpStatus rdp_network_shape(const struct RdpNetwork *net,
                                 uintptr_t *n_pairs,
                                 uintptr_t *relays,
                                 uintptr_t *n_hops,
                                 uintptr_t *states);

/*
 Samples the channel of `slot` under `seed` and runs `scheme` on it.

 # Safety
 `net` must be a live handle; `out` must be writable.
 */
enum RdpStatus rdp_select(const struct RdpNetwork *net,
                          enum RdpScheme scheme,
                          uint64_t seed,
                          uint64_t slot,
                          struct RdpAssignment **out);

/*
 # Safety
 `a` must be NULL or a handle from this library not yet freed.
 */
void rdp_assignment_free(struct RdpAssignment *a);

/*
 Smallest normalized end-to-end SINR over all pairs; NaN for NULL.

 # Safety
 `a` must be NULL or a live handle.
 */
double rdp_assignment_value(const struct RdpAssignment *a);

/*
 Comparisons (or visited paths) spent by the selector; 0 for NULL.

 # Safety
 `a` must be NULL or a live handle.
 */
uint64_t rdp_assignment_comparisons(const struct RdpAssignment *a);

/*
 True when some pair's normalized SINR is below 1; true for NULL.

 # Safety
 `a` must be NULL or a live handle.
 */
bool rdp_assignment_is_outage(const struct RdpAssignment *a);

/*
 Copies the relays as a row-major `stages x pairs` array into `out`.
 With `out` NULL, only reports the required length through `len_out`.

 # Safety
 `a` must be a live handle; `out` must hold `capacity` elements.
 */
enum RdpStatus rdp_assignment_relays(const struct RdpAssignment *a,
                                     uintptr_t *out,
                                     uintptr_t capacity,
                                     uintptr_t *len_out);

/*
 Copies the per-pair normalized end-to-end SINRs into `out`.

 # Safety
 As for [`rdp_assignment_relays`].
 */
enum RdpStatus rdp_assignment_per_user_sinr(const struct RdpAssignment *a,
                                            double *out,
                                            uintptr_t capacity,
                                            uintptr_t *len_out);

/*
 Max-min path through explicit branch weights.

 `weights` holds `2 Z + (L-2) Z^2` values: the `Z` weights out of the
 source layer, then each interior hop as a row-major `Z x Z` matrix
 (`from`, `to`), then the `Z` weights into the destination layer. The
 `L-1` chosen states go to `path`.

 # Safety
 `weights` must hold `weights_len` values and `path` `path_len` slots;
 `value` and `comparisons` may be NULL.
 */
enum RdpStatus rdp_solve_weights(uintptr_t states,
                                 uintptr_t hops,
                                 const double *weights,
                                 uintptr_t weights_len,
                                 uintptr_t *path,
                                 uintptr_t path_len,
                                 double *value,
                                 uint64_t *comparisons);

/*
 Monte-Carlo outage of `scheme` over `n_slots` slots.

 # Safety
 `net` must be a live handle; `out` must be writable.
 */
enum RdpStatus rdp_estimate_outage(const struct RdpNetwork *net,
                                   enum RdpScheme scheme,
                                   uint64_t n_slots,
                                   uint64_t seed,
                                   struct RdpOutageEstimate *out);

/*
 `Z + Z^2 (L-2)`, or 0 when `hops < 2`.
 */
uint64_t rdp_count_comparisons(uint64_t states, uint64_t hops);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELAY_DP_H */
