#ifndef SBM_H
#define SBM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum {
  SBM_STATUS_OK = 0,
  /**
   * Null pointer, bad enum value, undersized buffer.
   */
  SBM_STATUS_USAGE = 1,
  /**
   * Parameters violate a model invariant.
   */
  SBM_STATUS_INVALID = 2,
  /**
   * Numerical failure (truncation, convergence, missing peaks).
   */
  SBM_STATUS_NUMERIC = 3,
} SbmStatus;

/**
 * Opaque amplitude-scan handle.
 */
typedef struct SbmScan SbmScan;

/**
 * Opaque time-series handle.
 */
typedef struct SbmSeries SbmSeries;

/**
 * Opaque model + numerics handle.
 */
typedef struct SbmSystem SbmSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the current thread's last error message (NUL-terminated) into
 * `buffer`; returns the full message length in bytes excluding the
 * terminator. A null or undersized buffer leaves it untouched.
 */
size_t sbm_last_error(char *buffer, size_t capacity);

/**
 * Create a system handle. `drive_kind`: 0 none, 1 photon, 2 atom.
 * Frequencies are in units of the photon frequency; the numerics
 * default to the automatically selected truncation, `dt` 1e-3, and a
 * horizon of 50π.
 */
SbmStatus sbm_system_new(double epsilon,
                         double g,
                         int32_t drive_kind,
                         double amplitude,
                         double rise_time,
                         SbmSystem **out);

/**
 * Override the numerical configuration. Zero keeps the current value
 * (`n_max = 0` re-derives the automatic truncation).
 */
SbmStatus sbm_system_set_numerics(SbmSystem *system,
                                  size_t n_max,
                                  double dt,
                                  double t_end,
                                  size_t sample_stride,
                                  uint64_t seed);

void sbm_system_free(SbmSystem *system);

/**
 * Propagate from the default initial state and hand back a series
 * handle.
 */
SbmStatus sbm_dynamics_run(const SbmSystem *system, SbmSeries **out);

size_t sbm_series_len(const SbmSeries *series);

/**
 * Copy series columns into caller buffers of length `len`; any column
 * pointer may be null to skip it.
 */
SbmStatus sbm_series_copy(const SbmSeries *series,
                          double *t,
                          double *sigma_z,
                          double *sigma_x,
                          double *norm,
                          size_t len);

void sbm_series_free(SbmSeries *series);

/**
 * Long-time mean of the series' sigma_z over `[0, t_long]`.
 */
SbmStatus sbm_series_mean(const SbmSeries *series, double t_long, double *out);

/**
 * Closed-form `⟨σz(t)⟩` for the photon-driven system at ε = 0.
 */
SbmStatus sbm_closed_sigma_z_photon(const SbmSystem *system, double t, double *out);

/**
 * Closed-form `⟨σz(t)⟩` for the atom-driven system at ε = 0.
 */
SbmStatus sbm_closed_sigma_z_atom(const SbmSystem *system, double t, double *out);

/**
 * First-kind Bessel function `J_m(x)` for integer order `m ≤ 60`,
 * `0 ≤ x ≤ 60`.
 */
SbmStatus sbm_bessel_j(uint32_t m, double x, double *out);

/**
 * Resonant drive amplitudes `mω²/4g` for `m = 1..=m_max`, written to
 * `out` (capacity `capacity`); `written` receives the count.
 */
SbmStatus sbm_resonance_positions(double g,
                                  uint32_t m_max,
                                  double *out,
                                  size_t capacity,
                                  size_t *written);

/**
 * Coupling strength from two measured resonance means.
 */
SbmStatus sbm_estimate_coupling(double mean_m, double mean_mi, uint32_t m, uint32_t i, double *out);

/**
 * Scan the long-time mean over `[min, max]` in steps of `step` and
 * hand back a scan handle (peaks included).
 */
SbmStatus sbm_amplitude_scan(const SbmSystem *system,
                             double min,
                             double max,
                             double step,
                             double t_long,
                             SbmScan **out);

size_t sbm_scan_len(const SbmScan *scan);

/**
 * Copy the amplitude grid and means into caller buffers of length
 * `len`; either pointer may be null to skip that column.
 */
SbmStatus sbm_scan_copy(const SbmScan *scan, double *amplitudes, double *means, size_t len);

size_t sbm_scan_peak_count(const SbmScan *scan);

/**
 * Fetch one detected peak by index.
 */
SbmStatus sbm_scan_peak(const SbmScan *scan,
                        size_t index,
                        double *position,
                        double *mean,
                        uint32_t *m);

void sbm_scan_free(SbmScan *scan);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SBM_H */
