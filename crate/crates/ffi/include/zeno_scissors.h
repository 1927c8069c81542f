#ifndef ZENO_SCISSORS_H
#define ZENO_SCISSORS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum ZsStatus {
  ZS_STATUS_OK = 0,
  ZS_STATUS_NULL_POINTER = 1,
  ZS_STATUS_INVALID_ARGUMENT = 2,
  ZS_STATUS_PROBE_SYNTAX = 3,
  ZS_STATUS_TAIL_MASS = 4,
  ZS_STATUS_CUTOFF_TOO_SMALL = 5,
  ZS_STATUS_EXCLUDED_REGIME = 6,
  ZS_STATUS_NO_OSCILLATION = 7,
  ZS_STATUS_LEAKAGE = 8,
  // The post-selected branch has zero probability.
  ZS_STATUS_NO_OUTCOME = 9,
  ZS_STATUS_IO = 10,
  ZS_STATUS_BUFFER_TOO_SMALL = 11,
  ZS_STATUS_PANIC = 99,
} ZsStatus;

// Opaque result of a block-path cascade run.
typedef struct ZsCascade ZsCascade;

// Opaque probe-mode state.
typedef struct ZsProbe ZsProbe;

typedef struct ZsPhotonStatistics {
  double mean;
  double variance;
  // NaN when `mandel_q_defined` is false (vacuum input).
  double mandel_q;
  bool mandel_q_defined;
  double vacuum_weight;
} ZsPhotonStatistics;

// Stage geometry. `theta` is the parametric angle of a single stage.
typedef struct ZsStageParams {
  uintptr_t n;
  uintptr_t stages;
  double kappa;
  double theta;
} ZsStageParams;

// Signal amplitudes `v` (on |0>) and `w` (on |n>) for `m` probe photons.
typedef struct ZsBlock {
  uintptr_t m;
  double v_re;
  double v_im;
  double w_re;
  double w_im;
  double delta;
  double eta;
} ZsBlock;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, static storage.
const char *zs_version(void);

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next call into this library on the same thread.
const char *zs_last_error_message(void);

// Builds a probe from the mini-syntax (`fock:1`, `coherent:1.0`,
// `squeezed:-0.5,0.853498`, `custom:@FILE`) on `cutoff` levels.
//
// # Safety
// `spec` must be a NUL-terminated string; `out` must be writable.
enum ZsStatus zs_probe_from_spec(const char *spec, uintptr_t cutoff, struct ZsProbe **out);

// Builds a probe from `len` complex coefficients given as separate real and
// imaginary arrays. The coefficients are renormalized.
//
// # Safety
// `re` and `im` must each hold `len` doubles; `out` must be writable.
enum ZsStatus zs_probe_from_coefficients(const double *re,
                                         const double *im,
                                         uintptr_t len,
                                         uintptr_t cutoff,
                                         struct ZsProbe **out);

// Releases a probe. NULL is ignored.
//
// # Safety
// `probe` must come from a `zs_probe_from_*` call and not be freed twice.
void zs_probe_free(struct ZsProbe *probe);

// Number of levels of the probe (0 for NULL).
//
// # Safety
// `probe` must be NULL or a live probe handle.
uintptr_t zs_probe_len(const struct ZsProbe *probe);

// Copies the number-basis coefficients into caller buffers of `len` doubles.
//
// # Safety
// `probe` must be a live handle; `re`, `im` must hold `len` doubles.
enum ZsStatus zs_probe_amplitudes(const struct ZsProbe *probe,
                                  double *re,
                                  double *im,
                                  uintptr_t len);

// # Safety
// `probe` must be a live handle; `out` must be writable.
enum ZsStatus zs_probe_statistics(const struct ZsProbe *probe, struct ZsPhotonStatistics *out);

// Fills `out` with the design geometry `theta = pi / (2 stages)`.
//
// # Safety
// `out` must be writable.
enum ZsStatus zs_stage_params_design(uintptr_t n,
                                     uintptr_t stages,
                                     double kappa,
                                     struct ZsStageParams *out);

// # Safety
// `params` must be readable; `out` must be writable.
enum ZsStatus zs_vw_closed_form(const struct ZsStageParams *params,
                                uintptr_t m,
                                struct ZsBlock *out);

// # Safety
// `params` must be readable; `out` must be writable.
enum ZsStatus zs_vw_asymptotic(const struct ZsStageParams *params,
                               uintptr_t m,
                               struct ZsBlock *out);

// # Safety
// `params` must be readable; `out` must be writable.
enum ZsStatus zs_oscillation_period(const struct ZsStageParams *params, uintptr_t m, double *out);

// `cos^(2 stages)(theta)`.
double zs_projective_survival(uintptr_t stages, double theta);

// Runs the cascade on the closed-form path.
//
// # Safety
// `params` readable, `probe` a live handle, `out` writable.
enum ZsStatus zs_cascade_run(const struct ZsStageParams *params,
                             const struct ZsProbe *probe,
                             struct ZsCascade **out);

// Releases a cascade result. NULL is ignored.
//
// # Safety
// `cascade` must come from `zs_cascade_run` and not be freed twice.
void zs_cascade_free(struct ZsCascade *cascade);

// Probability of finding `n` photons in the signal mode (NaN for NULL).
//
// # Safety
// `cascade` must be NULL or a live handle.
double zs_cascade_emission_probability(const struct ZsCascade *cascade);

// Probability of the post-selected (signal vacuum) branch (NaN for NULL).
//
// # Safety
// `cascade` must be NULL or a live handle.
double zs_cascade_postselect_probability(const struct ZsCascade *cascade);

// Fidelity of the post-selected probe with the vacuum-stripped input.
// Returns `ZS_STATUS_NO_OUTCOME` when the branch never occurs.
//
// # Safety
// `cascade` a live handle, `out` writable.
enum ZsStatus zs_cascade_truncation_fidelity(const struct ZsCascade *cascade, double *out);

// Copies the normalized post-selected probe state.
//
// # Safety
// `cascade` a live handle; `re`, `im` must hold `len` doubles.
enum ZsStatus zs_cascade_truncated_state(const struct ZsCascade *cascade,
                                         double *re,
                                         double *im,
                                         uintptr_t len);

// # Safety
// `cascade` a live handle, `out` writable.
enum ZsStatus zs_cascade_block(const struct ZsCascade *cascade, uintptr_t m, struct ZsBlock *out);

// Largest amplitude difference between the closed-form path and full
// two-mode propagation with signal cutoff `a_cutoff`.
//
// # Safety
// `params` readable, `probe` a live handle, `out` writable.
enum ZsStatus zs_oracle_max_deviation(const struct ZsStageParams *params,
                                      const struct ZsProbe *probe,
                                      uintptr_t a_cutoff,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZENO_SCISSORS_H */
