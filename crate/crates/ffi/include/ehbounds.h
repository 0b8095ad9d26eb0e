#ifndef EHBOUNDS_H
#define EHBOUNDS_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EhbStatus {
  EHB_STATUS_OK = 0,
  EHB_STATUS_DOMAIN = 1,
  EHB_STATUS_INFEASIBLE_TILT = 2,
  EHB_STATUS_DIVERGENT_MOMENT = 3,
  EHB_STATUS_UNSUPPORTED_MODE = 4,
  EHB_STATUS_CONSISTENCY = 5,
  EHB_STATUS_CONFIG = 6,
  EHB_STATUS_IO = 7,
  EHB_STATUS_NULL_POINTER = 8,
  EHB_STATUS_PANIC = 9,
} EhbStatus;

typedef enum EhbQuantileMode {
  EHB_QUANTILE_MODE_LOWER = 0,
  EHB_QUANTILE_MODE_UPPER = 1,
  EHB_QUANTILE_MODE_THRESHOLD = 2,
} EhbQuantileMode;

/**
 * Opaque energy-arrival model.
 */
typedef struct EhbModel EhbModel;

typedef struct EhbBound {
  double value;
  double first_order;
  double second_order;
  double residual;
  /**
   * All side conditions of the bound hold.
   */
  bool feasible;
} EhbBound;

typedef struct EhbSavingLength {
  double t_n;
  /**
   * Valid only when `has_m` is set.
   */
  uint64_t m;
  bool has_m;
  bool feasible;
} EhbSavingLength;

typedef struct EhbSecondOrder {
  double v_minus;
  /**
   * Valid only when `has_v_minus_minus` is set (eps < 1/2).
   */
  double v_minus_minus;
  bool has_v_minus_minus;
  double v_plus;
} EhbSecondOrder;

typedef struct EhbSimEstimate {
  double estimate;
  double std_error;
  uint64_t trials;
  uint64_t seed;
} EhbSimEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or an empty string. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ehb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ehb_version(void);

enum EhbStatus ehb_model_deterministic(double value, struct EhbModel **out);

enum EhbStatus ehb_model_exponential(double mean, struct EhbModel **out);

/**
 * Uniform on [0, 2·mean].
 */
enum EhbStatus ehb_model_uniform(double mean, struct EhbModel **out);

enum EhbStatus ehb_model_two_point(double low, double high, double p_high, struct EhbModel **out);

/**
 * Parses `{"family": ..., "params": {...}}`.
 */
enum EhbStatus ehb_model_from_json(const char *json, struct EhbModel **out);

/**
 * Releases a model. Null is ignored.
 */
void ehb_model_free(struct EhbModel *model);

/**
 * Writes E[E], E[E²] and E[E³]. Any out-pointer may be null.
 */
enum EhbStatus ehb_model_moments(const struct EhbModel *model,
                                 double *mean,
                                 double *m2,
                                 double *m3);

/**
 * ½ log₂(1 + p).
 */
enum EhbStatus ehb_capacity(double p, double *out);

double ehb_normal_cdf(double x);

enum EhbStatus ehb_normal_inv_cdf(double p, double *out);

enum EhbStatus ehb_achievable_log_m(double p, uint64_t n, double eps2, struct EhbBound *out);

enum EhbStatus ehb_converse_log_m(const struct EhbModel *model,
                                  uint64_t n,
                                  uint64_t l,
                                  double eps,
                                  struct EhbBound *out);

enum EhbStatus ehb_saving_length(const struct EhbModel *model,
                                 uint64_t l,
                                 uint64_t n,
                                 double eps1,
                                 struct EhbSavingLength *out);

/**
 * Second-order coefficients. `l = 0` selects the growing-L regime,
 * otherwise L is held constant.
 */
enum EhbStatus ehb_second_order(const struct EhbModel *model,
                                uint64_t l,
                                double eps,
                                struct EhbSecondOrder *out);

enum EhbStatus ehb_rate_quantile(const struct EhbModel *model,
                                 double lambda,
                                 double eps,
                                 enum EhbQuantileMode mode,
                                 double *out);

/**
 * Monte Carlo energy-outage probability with all per-trajectory identity
 * checks enabled. The result does not depend on `workers`.
 */
enum EhbStatus ehb_simulate_outage(const struct EhbModel *model,
                                   double p,
                                   uint64_t n,
                                   uint64_t l,
                                   uint64_t m,
                                   uint64_t trials,
                                   uint64_t seed,
                                   size_t workers,
                                   struct EhbSimEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EHBOUNDS_H */
