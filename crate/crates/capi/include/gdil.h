/* C interface of gdil: passive dilations of Gaussian quantum channels. */

#ifndef GDIL_H
#define GDIL_H

/* Generated by cbindgen from gdil-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum GdilStatus {
  GDIL_STATUS_OK = 0,
  // A pointer argument was null or a buffer length was wrong.
  GDIL_STATUS_INVALID_ARGUMENT = 1,
  // The input matrices do not form a completely positive channel.
  GDIL_STATUS_INVALID_CHANNEL = 2,
  // The channel admits no passive dilation (at the requested mode count).
  GDIL_STATUS_NOT_DILATABLE = 3,
  // An eigenvalue or singular value computation failed to converge.
  GDIL_STATUS_NUMERICAL_FAILURE = 4,
} GdilStatus;

// Opaque Gaussian channel handle.
typedef struct GdilChannel GdilChannel;

// Opaque passive dilation handle.
typedef struct GdilDilation GdilDilation;

// Opaque beamsplitter normal form handle.
typedef struct GdilNormalForm GdilNormalForm;

// Relative/absolute tolerance pair; pass NULL wherever a
// `const GdilTolerance*` is expected to use the defaults (1e-9, 1e-12).
typedef struct GdilTolerance {
  double rel;
  double abs;
} GdilTolerance;

// Verdicts and residuals of the dilatability test.
typedef struct GdilDilatability {
  bool psd_ok;
  bool commutes_ok;
  bool kernel_ok;
  // Whether a dilation exists with the queried environment mode count.
  bool dilatable;
  // Least environment mode count allowed by the rank bound.
  size_t min_modes;
  size_t rank_y;
  double sigma_hat_min_eigenvalue;
  double commutator_norm;
} GdilDilatability;

// Residuals of a dilation verification.
typedef struct GdilVerification {
  bool valid;
  double symplectic_equation_residual;
  double orthogonal_equation_residual;
  double noise_equation_residual;
  double s1_residual;
  double membership_residual;
  double env_min_eigenvalue;
  double action_residual;
} GdilVerification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread. The pointer is
// valid until the next failing call on the same thread.
const char *gdil_last_error_message(void);

// Creates a channel from row-major `2n × 2n` matrices `X` and `Y` in blocked
// ordering. The CP condition is validated.
//
// # Safety
// `x` and `y` must point to `4n²` doubles; `out` must be a valid pointer.
enum GdilStatus gdil_channel_new(size_t n,
                                 const double *x,
                                 const double *y,
                                 const struct GdilTolerance *tol,
                                 struct GdilChannel **out);

// # Safety
// `channel` must come from this library and not be freed twice.
void gdil_channel_free(struct GdilChannel *channel);

// # Safety
// `channel` must be a live handle.
size_t gdil_channel_modes(const struct GdilChannel *channel);

// Evaluates the dilatability conditions at `env_modes` environment modes.
//
// # Safety
// `channel` must be a live handle; `report` must be valid if non-null.
enum GdilStatus gdil_check_dilatable(const struct GdilChannel *channel,
                                     size_t env_modes,
                                     const struct GdilTolerance *tol,
                                     struct GdilDilatability *report);

// Minimal environment mode count `½·rank Y` of a dilatable channel.
//
// # Safety
// `channel` must be live; `out` must be valid.
enum GdilStatus gdil_minimal_modes(const struct GdilChannel *channel,
                                   const struct GdilTolerance *tol,
                                   size_t *out);

// Reports whether a dilatable channel is passive (`[Y, σ] = 0`).
//
// # Safety
// `channel` must be live; `passive` must be valid.
enum GdilStatus gdil_channel_is_passive(const struct GdilChannel *channel,
                                        const struct GdilTolerance *tol,
                                        bool *passive);

// Constructs a passive dilation with `env_modes` environment modes.
//
// # Safety
// `channel` must be live; `out` must be valid.
enum GdilStatus gdil_construct_dilation(const struct GdilChannel *channel,
                                        size_t env_modes,
                                        const struct GdilTolerance *tol,
                                        struct GdilDilation **out);

// # Safety
// `dilation` must come from this library and not be freed twice.
void gdil_dilation_free(struct GdilDilation *dilation);

// # Safety
// `dilation` must be a live handle.
size_t gdil_dilation_sys_modes(const struct GdilDilation *dilation);

// # Safety
// `dilation` must be a live handle.
size_t gdil_dilation_env_modes(const struct GdilDilation *dilation);

// Copies the `2(n+l) × 2(n+l)` orthogonal symplectic matrix into `out`
// (row-major, `len` doubles available).
//
// # Safety
// `dilation` must be live; `out` must hold at least `len` doubles.
enum GdilStatus gdil_dilation_unitary(const struct GdilDilation *dilation, double *out, size_t len);

// Copies the `2l × 2l` environment covariance into `out`.
//
// # Safety
// `dilation` must be live; `out` must hold at least `len` doubles.
enum GdilStatus gdil_dilation_env_covariance(const struct GdilDilation *dilation,
                                             double *out,
                                             size_t len);

// Verifies a dilation against a channel; a failing verification is reported
// through `verification.valid = false`, not an error status.
//
// # Safety
// Both handles must be live; `verification` must be valid if non-null.
enum GdilStatus gdil_verify_dilation(const struct GdilChannel *channel,
                                     const struct GdilDilation *dilation,
                                     const struct GdilTolerance *tol,
                                     struct GdilVerification *verification);

// Computes the beamsplitter normal form of a dilatable channel.
//
// # Safety
// `channel` must be live; `out` must be valid.
enum GdilStatus gdil_normal_form(const struct GdilChannel *channel,
                                 const struct GdilTolerance *tol,
                                 struct GdilNormalForm **out);

// # Safety
// `normal_form` must come from this library and not be freed twice.
void gdil_normal_form_free(struct GdilNormalForm *normal_form);

// # Safety
// `normal_form` must be a live handle.
size_t gdil_normal_form_modes(const struct GdilNormalForm *normal_form);

// Copies the `n` transmissivities (sorted descending) into `out`.
//
// # Safety
// `normal_form` must be live; `out` must hold at least `len` doubles.
enum GdilStatus gdil_normal_form_lambdas(const struct GdilNormalForm *normal_form,
                                         double *out,
                                         size_t len);

// Copies the output-side passive factor `G` (`2n × 2n`, blocked) into `out`.
//
// # Safety
// `normal_form` must be live; `out` must hold at least `len` doubles.
enum GdilStatus gdil_normal_form_factor_g(const struct GdilNormalForm *normal_form,
                                          double *out,
                                          size_t len);

// Copies the input-side passive factor `F` (`2n × 2n`, blocked) into `out`.
//
// # Safety
// `normal_form` must be live; `out` must hold at least `len` doubles.
enum GdilStatus gdil_normal_form_factor_f(const struct GdilNormalForm *normal_form,
                                          double *out,
                                          size_t len);

// Copies the rotated environment covariance `γ̃_E` (`2n × 2n`) into `out`.
//
// # Safety
// `normal_form` must be live; `out` must hold at least `len` doubles.
enum GdilStatus gdil_normal_form_env_covariance(const struct GdilNormalForm *normal_form,
                                                double *out,
                                                size_t len);

// Draws a seeded random dilatable channel together with its ground-truth
// dilation. Both outputs are optional; pass NULL to skip either.
//
// # Safety
// Non-null outputs must be valid pointers.
enum GdilStatus gdil_random_dilatable_channel(size_t sys_modes,
                                              size_t env_modes,
                                              bool passive_env,
                                              uint64_t seed,
                                              struct GdilChannel **channel_out,
                                              struct GdilDilation **dilation_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GDIL_H */
