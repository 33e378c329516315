#ifndef OILSEC_H
#define OILSEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OilsecProfileKind {
  OILSEC_PROFILE_KIND_ATTENUATION = 0,
  OILSEC_PROFILE_KIND_TRANSPARENCY_GAIN = 1,
  OILSEC_PROFILE_KIND_RESPONSIVITY = 2,
} OilsecProfileKind;

typedef enum OilsecStatus {
  OILSEC_STATUS_OK = 0,
  OILSEC_STATUS_NULL_POINTER = 1,
  OILSEC_STATUS_INVALID_ARGUMENT = 2,
  OILSEC_STATUS_DOMAIN = 3,
  OILSEC_STATUS_NON_DISTILLABLE = 4,
  OILSEC_STATUS_OUT_OF_RANGE = 5,
  OILSEC_STATUS_IO = 6,
  OILSEC_STATUS_PARSE = 7,
  OILSEC_STATUS_PANIC = 8,
} OilsecStatus;

/**
 * Protocol, detector, channel and optimizer settings for key-rate calls.
 */
typedef struct OilsecModel OilsecModel;

/**
 * A piecewise-linear spectral profile.
 */
typedef struct OilsecProfile OilsecProfile;

typedef struct OilsecProtocol {
  double send_prob;
  double signal_intensity;
  double decoy_intensity;
  double key_basis_prob;
  double ec_efficiency;
  double phase_misalignment;
  double polarisation_misalignment;
  double enhancement_factor;
} OilsecProtocol;

typedef struct OilsecDetector {
  double dark_count_prob;
  double efficiency;
} OilsecDetector;

typedef struct OilsecChannel {
  double fiber_loss_db_per_km;
  double distance_km;
} OilsecChannel;

typedef struct OilsecOptimizerSettings {
  size_t grid_eps;
  size_t grid_mu;
  double eps_min;
  double eps_max;
  double mu_min;
  double mu_max;
  size_t max_evals;
  double rel_tol;
} OilsecOptimizerSettings;

/**
 * Closed-form statistics. `ez` and `ex` are NaN when their yield is zero.
 */
typedef struct OilsecYields {
  double s0;
  double s1;
  double sz_corr;
  double sz_err;
  double sz;
  double ez;
  double sx_corr;
  double sx_err;
  double sx;
  double ex;
  double e_ph_bound;
} OilsecYields;

typedef struct OilsecOptimization {
  double best_eps;
  double best_mu;
  double best_rate;
  size_t evaluations;
  bool converged;
} OilsecOptimization;

typedef struct OilsecSweepRow {
  double distance_km;
  double rate_expected;
  double rate_actual_aware;
  double rate_oblivious;
  double eps_opt;
  double mu_opt;
} OilsecSweepRow;

typedef struct OilsecBudgetReport {
  double wavelength_nm;
  double lidt_w;
  double total_isolation_db;
  double worst_case_output_w;
  double worst_case_photons_per_pulse;
  double max_photons_per_pulse;
  bool meets_target;
  double required_isolation_db;
  double shortfall_vs_reference_db;
} OilsecBudgetReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *oilsec_version(void);

/**
 * Message for the most recent failure on this thread, or NULL.
 */
const char *oilsec_last_error(void);

/**
 * New model with default parameters. Release with [`oilsec_model_free`].
 */
struct OilsecModel *oilsec_model_new(void);

/**
 * # Safety
 * `model` must be NULL or a pointer from [`oilsec_model_new`] not yet freed.
 */
void oilsec_model_free(struct OilsecModel *model);

/**
 * # Safety
 * `model` must be a live model handle and `out` a writable pointer.
 */
enum OilsecStatus oilsec_model_get_protocol(const struct OilsecModel *model,
                                            struct OilsecProtocol *out);

/**
 * Replaces the protocol parameters after validating them.
 *
 * # Safety
 * `model` must be a live model handle and `protocol` a readable pointer.
 */
enum OilsecStatus oilsec_model_set_protocol(struct OilsecModel *model,
                                            const struct OilsecProtocol *protocol);

/**
 * # Safety
 * `model` must be a live model handle and `out` a writable pointer.
 */
enum OilsecStatus oilsec_model_get_detector(const struct OilsecModel *model,
                                            struct OilsecDetector *out);

/**
 * # Safety
 * `model` must be a live model handle and `detector` a readable pointer.
 */
enum OilsecStatus oilsec_model_set_detector(struct OilsecModel *model,
                                            const struct OilsecDetector *detector);

/**
 * # Safety
 * `model` must be a live model handle and `out` a writable pointer.
 */
enum OilsecStatus oilsec_model_get_channel(const struct OilsecModel *model,
                                           struct OilsecChannel *out);

/**
 * # Safety
 * `model` must be a live model handle and `channel` a readable pointer.
 */
enum OilsecStatus oilsec_model_set_channel(struct OilsecModel *model,
                                           const struct OilsecChannel *channel);

/**
 * # Safety
 * `model` must be a live model handle and `out` a writable pointer.
 */
enum OilsecStatus oilsec_model_get_optimizer(const struct OilsecModel *model,
                                             struct OilsecOptimizerSettings *out);

/**
 * # Safety
 * `model` must be a live model handle and `settings` a readable pointer.
 */
enum OilsecStatus oilsec_model_set_optimizer(struct OilsecModel *model,
                                             const struct OilsecOptimizerSettings *settings);

/**
 * Closed-form yields at the model's signal intensity.
 *
 * # Safety
 * `model` must be a live model handle and `out` a writable pointer.
 */
enum OilsecStatus oilsec_yields(const struct OilsecModel *model, struct OilsecYields *out);

/**
 * Key rate with `formula_intensity` in the bound and `observed_intensity`
 * generating the observed QBER. Pass the same value twice for the honest rate.
 *
 * # Safety
 * `model` must be a live model handle and `out` a writable pointer.
 */
enum OilsecStatus oilsec_secret_key_rate(const struct OilsecModel *model,
                                         double formula_intensity,
                                         double observed_intensity,
                                         double *out);

/**
 * Optimal sending probability and signal intensity at the model's distance.
 *
 * # Safety
 * `model` must be a live model handle and `out` a writable pointer.
 */
enum OilsecStatus oilsec_optimize(const struct OilsecModel *model, struct OilsecOptimization *out);

/**
 * Expected, aware and oblivious rates at each of `count` ascending
 * distances. `rows` must have room for `count` entries.
 *
 * # Safety
 * `model` must be a live model handle; `distances_km` and `rows` must point
 * to `count` readable and writable elements respectively.
 */
enum OilsecStatus oilsec_attack_sweep(const struct OilsecModel *model,
                                      const double *distances_km,
                                      size_t count,
                                      double kappa,
                                      struct OilsecSweepRow *rows);

/**
 * Damage-threshold power at `wavelength_nm` scaled from a reference point.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum OilsecStatus oilsec_lidt_at(double wavelength_nm,
                                 double reference_power_w,
                                 double reference_nm,
                                 double *out);

/**
 * Isolation that brings `input_w` down to `max_photons_per_pulse`.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum OilsecStatus oilsec_required_isolation_db(double input_w,
                                               double wavelength_nm,
                                               double pulse_rate_hz,
                                               double max_photons_per_pulse,
                                               double *out);

/**
 * Loads a `wavelength_nm,value_db` CSV file. Release with [`oilsec_profile_free`].
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum OilsecStatus oilsec_profile_load(const char *path,
                                      enum OilsecProfileKind kind,
                                      struct OilsecProfile **out);

/**
 * Builds a profile from `count` (wavelength, dB) pairs.
 *
 * # Safety
 * `name` must be a NUL-terminated string, `wavelengths_nm` and `values_db`
 * must point to `count` elements and `out` must be writable.
 */
enum OilsecStatus oilsec_profile_from_points(const char *name,
                                             enum OilsecProfileKind kind,
                                             const double *wavelengths_nm,
                                             const double *values_db,
                                             size_t count,
                                             struct OilsecProfile **out);

/**
 * # Safety
 * `profile` must be NULL or a handle from this library not yet freed.
 */
void oilsec_profile_free(struct OilsecProfile *profile);

/**
 * Interpolated value; out-of-range wavelengths fail with
 * `OILSEC_STATUS_OUT_OF_RANGE`.
 *
 * # Safety
 * `profile` must be a live handle and `out` a writable pointer.
 */
enum OilsecStatus oilsec_profile_value_at(const struct OilsecProfile *profile,
                                          double wavelength_nm,
                                          double *out);

/**
 * # Safety
 * `profile` must be a live handle; `min_nm` and `max_nm` writable pointers.
 */
enum OilsecStatus oilsec_profile_range(const struct OilsecProfile *profile,
                                       double *min_nm,
                                       double *max_nm);

/**
 * Transparency gained by connecting the cavity. The result is a new handle.
 *
 * # Safety
 * Both profiles must be live handles and `out` a writable pointer.
 */
enum OilsecStatus oilsec_transparency_gain(const struct OilsecProfile *loss_disconnected,
                                           const struct OilsecProfile *loss_connected_off,
                                           struct OilsecProfile **out);

/**
 * Total isolation of `count` cascaded components at `wavelength_nm`.
 *
 * # Safety
 * `components` must point to `count` live profile handles; `out` writable.
 */
enum OilsecStatus oilsec_cascade_isolation(const struct OilsecProfile *const *components,
                                           size_t count,
                                           double wavelength_nm,
                                           double *out);

/**
 * Worst-case leakage through the cascade with Eve at the damage threshold.
 *
 * # Safety
 * `components` must point to `count` live profile handles; `out` writable.
 */
enum OilsecStatus oilsec_budget_report(double wavelength_nm,
                                       const struct OilsecProfile *const *components,
                                       size_t count,
                                       double pulse_rate_hz,
                                       double max_photons_per_pulse,
                                       struct OilsecBudgetReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OILSEC_H */
