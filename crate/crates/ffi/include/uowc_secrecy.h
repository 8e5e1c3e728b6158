#ifndef UOWC_SECRECY_H
#define UOWC_SECRECY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Metric selectors for `uowc_mc_estimate`.
#define UOWC_METRIC_ASC 0

#define UOWC_METRIC_SOP_LOWER 1

#define UOWC_METRIC_SPSC 2

#define UOWC_METRIC_SOP_EXACT 3

// Result codes. `UOWC_STATUS_OK` is zero.
typedef enum UowcStatus {
  UOWC_STATUS_OK = 0,
  UOWC_STATUS_NULL_POINTER = 1,
  UOWC_STATUS_INVALID_PARAMETER = 2,
  UOWC_STATUS_PARSE = 3,
  UOWC_STATUS_DOMAIN = 4,
  UOWC_STATUS_NOT_CONVERGED = 5,
  UOWC_STATUS_CANCELLATION = 6,
  UOWC_STATUS_PANIC = 7,
  UOWC_STATUS_OTHER = 8,
} UowcStatus;

// Opaque system configuration.
typedef struct UowcConfig UowcConfig;

// One RF link. `format` is 1 or 2; `avg_snr_db` is the mean combined SNR.
typedef struct UowcRfLink {
  double eta;
  uint32_t mu;
  uint32_t n_antennas;
  double avg_snr_db;
  uint32_t format;
} UowcRfLink;

// The optical hop. `detection` is 1 for heterodyne, 2 for IM/DD.
typedef struct UowcOpticalLink {
  double omega;
  double lambda;
  double a;
  double b;
  double c;
  uint32_t detection;
  double avg_snr_db;
} UowcOpticalLink;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a configuration. `target_rate_bits` is in bits per channel use.
//
// # Safety
// Pointers must be valid or null; `out` receives a handle owned by the caller.
enum UowcStatus uowc_config_new(const struct UowcRfLink *sr,
                                const struct UowcRfLink *se,
                                const struct UowcOpticalLink *rd,
                                uint32_t n_s,
                                double target_rate_bits,
                                struct UowcConfig **out);

// Builds a configuration from the JSON config-file schema; any sweep block is
// ignored.
//
// # Safety
// `json` must be a NUL-terminated string; `out` receives a caller-owned handle.
enum UowcStatus uowc_config_from_json(const char *json, struct UowcConfig **out);

// # Safety
// `cfg` must come from this library and not be used afterwards. Null is a no-op.
void uowc_config_free(struct UowcConfig *cfg);

// Copy of `cfg` with a new target rate.
//
// # Safety
// `cfg` must be a live handle; `out` receives a caller-owned handle.
enum UowcStatus uowc_config_with_target_rate(const struct UowcConfig *cfg,
                                             double target_rate_bits,
                                             struct UowcConfig **out);

// Average secrecy capacity in nats, by numerical integration.
//
// # Safety
// `cfg` must be a live handle and `value` writable.
enum UowcStatus uowc_asc(const struct UowcConfig *cfg, double *value);

// Average secrecy capacity in nats from the term assembly, cross-checked
// against the integral; disagreement gives `UOWC_STATUS_CANCELLATION`.
//
// # Safety
// `cfg` must be a live handle and `value` writable.
enum UowcStatus uowc_asc_series(const struct UowcConfig *cfg, double *value);

// Lower bound on the secrecy outage probability.
//
// # Safety
// `cfg` must be a live handle and `value` writable.
enum UowcStatus uowc_sop_lower(const struct UowcConfig *cfg, double *value);

// Same bound from the closed-form terms.
//
// # Safety
// `cfg` must be a live handle and `value` writable.
enum UowcStatus uowc_sop_lower_closed(const struct UowcConfig *cfg, double *value);

// Probability of strictly positive secrecy capacity.
//
// # Safety
// `cfg` must be a live handle and `value` writable.
enum UowcStatus uowc_spsc(const struct UowcConfig *cfg, double *value);

// Monte Carlo estimate on the stream (seed, stream_id). `UOWC_METRIC_SOP_EXACT` uses the
// exact relay SNR, the others the min form. Needs at least 1000 samples.
//
// # Safety
// `cfg` must be a live handle; `mean` and `std_error` writable.
enum UowcStatus uowc_mc_estimate(const struct UowcConfig *cfg,
                                 uint32_t metric,
                                 size_t n_samples,
                                 uint64_t seed,
                                 uint64_t stream_id,
                                 double *mean,
                                 double *std_error);

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *uowc_last_error(void);

// Library version as a static NUL-terminated string.
const char *uowc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UOWC_SECRECY_H */
