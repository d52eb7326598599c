#ifndef TWRC_H
#define TWRC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Protocol selector for [`twrc_protocol_boundary`] and [`twrc_region_sweep`].
typedef enum TwrcCurve {
  TWRC_CURVE_OUTER = 0,
  TWRC_CURVE_OUTER_ANALYTIC = 1,
  TWRC_CURVE_MABC = 2,
  TWRC_CURVE_TDBC = 3,
  TWRC_CURVE_HBC = 4,
  TWRC_CURVE_SIX_STATE_DF = 5,
  TWRC_CURVE_SIX_STATE = 6,
  TWRC_CURVE_COMABC = 7,
} TwrcCurve;

// Result code of every call.
typedef enum TwrcStatus {
  TWRC_STATUS_OK = 0,
  // A required pointer argument was NULL.
  TWRC_STATUS_NULL_POINTER = 1,
  // Channel gains violate the ordering or range rules.
  TWRC_STATUS_VALIDATION = 2,
  // The LP engine failed.
  TWRC_STATUS_SOLVER = 3,
  TWRC_STATUS_IO = 4,
  // An argument such as a ratio, weight or grid size was out of range.
  TWRC_STATUS_PARAMETER = 5,
  // A scalar was outside a function's domain.
  TWRC_STATUS_DOMAIN = 6,
  // Regions on different channels were compared.
  TWRC_STATUS_COMPARISON = 7,
  // An index was past the end of a region.
  TWRC_STATUS_OUT_OF_RANGE = 8,
  // Internal panic; the library state is unaffected.
  TWRC_STATUS_PANIC = 99,
} TwrcStatus;

// Opaque validated channel.
typedef struct TwrcGains TwrcGains;

// Opaque swept region.
typedef struct TwrcRegion TwrcRegion;

// Direct-link thresholds in linear SNR; NaN when not defined for the channel.
typedef struct TwrcThresholds {
  double gamma30;
  double gamma31;
  double gamma32;
  // `gamma30` for equal gains, otherwise the smaller of the other two.
  double operative;
} TwrcThresholds;

// One boundary point of a swept region.
typedef struct TwrcPoint {
  double theta_deg;
  // `Ra / Rb`; infinite on the `Ra` axis.
  double k;
  double ra;
  double rb;
} TwrcPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failed call on this thread, or an empty string.
// The pointer stays valid until the next call on the same thread.
const char *twrc_last_error_message(void);

// `log2(1 + gamma)`.
//
// # Safety
// `out_rate` must be NULL or valid for writes.
enum TwrcStatus twrc_cap(double gamma, double *out_rate);

// Convert decibels to a linear SNR.
//
// # Safety
// `out_linear` must be NULL or valid for writes.
enum TwrcStatus twrc_db_to_linear(double snr_db, double *out_linear);

// Validate linear SNRs (`gamma3 <= gamma1 <= gamma2`) and return a handle.
//
// # Safety
// `out_gains` must be NULL or valid for writes. The handle must be released
// with [`twrc_gains_free`].
enum TwrcStatus twrc_gains_new(double gamma1,
                               double gamma2,
                               double gamma3,
                               bool auto_swap,
                               struct TwrcGains **out_gains);

// As [`twrc_gains_new`] with the SNRs in decibels.
//
// # Safety
// Same as [`twrc_gains_new`].
enum TwrcStatus twrc_gains_from_db(double gamma1_db,
                                   double gamma2_db,
                                   double gamma3_db,
                                   bool auto_swap,
                                   struct TwrcGains **out_gains);

// Read back the stored linear gains. Any out pointer may be NULL.
//
// # Safety
// `gains` must be a live handle; non-NULL out pointers must be valid for writes.
enum TwrcStatus twrc_gains_get(const struct TwrcGains *gains_h,
                               double *out_gamma1,
                               double *out_gamma2,
                               double *out_gamma3,
                               bool *out_swapped);

// Release a gains handle. NULL is ignored.
//
// # Safety
// `gains` must be NULL or a handle not yet freed.
void twrc_gains_free(struct TwrcGains *gains_h);

// Numerical outer bound on the ray `Ra = k * Rb`. `out_lambda` may be NULL;
// otherwise it receives the six state time shares.
//
// # Safety
// `gains` must be a live handle; `out_ra`, `out_rb` valid for writes;
// `out_lambda` NULL or valid for six writes.
enum TwrcStatus twrc_outer_ratio_bound(const struct TwrcGains *gains_h,
                                       double k,
                                       double *out_ra,
                                       double *out_rb,
                                       double *out_lambda);

// Numerical maximum of `wa * Ra + wb * Rb` over the outer bound.
//
// # Safety
// `gains` must be a live handle; out pointers valid for writes (`out_ra` and
// `out_rb` may be NULL).
enum TwrcStatus twrc_outer_weighted_bound(const struct TwrcGains *gains_h,
                                          double wa,
                                          double wb,
                                          double *out_value,
                                          double *out_ra,
                                          double *out_rb);

// Closed-form upper bound on `Rb` along `Ra = k * Rb`, `k > 0`.
//
// # Safety
// `gains` must be a live handle; `out_rb` valid for writes.
enum TwrcStatus twrc_analytic_rb_bound(const struct TwrcGains *gains_h, double k, double *out_rb);

// Closed-form upper bound on `k * Ra + Rb`, `k >= 0`.
//
// # Safety
// `gains` must be a live handle; `out_value` valid for writes.
enum TwrcStatus twrc_analytic_weighted_bound(const struct TwrcGains *gains_h,
                                             double k,
                                             double *out_value);

// Largest one-way rates: `Rb` with `Ra = 0` and `Ra` with `Rb = 0`.
// Either out pointer may be NULL.
//
// # Safety
// `gains` must be a live handle; non-NULL out pointers valid for writes.
enum TwrcStatus twrc_one_way_bound(const struct TwrcGains *gains_h, double *out_rb, double *out_ra);

// Check the closed-form dual point for `k >= 1`: feasibility and the
// smallest constraint slack.
//
// # Safety
// `gains` must be a live handle; out pointers valid for writes.
enum TwrcStatus twrc_dual_point_feasible(const struct TwrcGains *gains_h,
                                         double k,
                                         bool *out_feasible,
                                         double *out_min_slack);

// Direct-link SNR thresholds above which the outer bound gains nothing from
// a stronger direct link. The stored `gamma3` is ignored.
//
// # Safety
// `gains` must be a live handle; `out_thresholds` valid for writes.
enum TwrcStatus twrc_capacity_thresholds(const struct TwrcGains *gains_h,
                                         struct TwrcThresholds *out_thresholds);

// Boundary point of a protocol (or bound) on the ray `Ra = k * Rb`.
// `alpha_grid` is only used by the 6-state DF protocol.
//
// # Safety
// `gains` must be a live handle; `out_point` valid for writes.
enum TwrcStatus twrc_protocol_boundary(const struct TwrcGains *gains_h,
                                       enum TwrcCurve curve,
                                       double k,
                                       size_t alpha_grid,
                                       struct TwrcPoint *out_point);

// Sweep a region over `theta_points` rays (at least 3).
//
// # Safety
// `gains` must be a live handle; `out_region` valid for writes. The region
// must be released with [`twrc_region_free`].
enum TwrcStatus twrc_region_sweep(const struct TwrcGains *gains_h,
                                  enum TwrcCurve curve,
                                  size_t theta_points,
                                  size_t alpha_grid,
                                  struct TwrcRegion **out_region);

// Number of swept points, ordered by angle from the `Rb` axis.
//
// # Safety
// `region` must be a live handle; `out_len` valid for writes.
enum TwrcStatus twrc_region_len(const struct TwrcRegion *region, size_t *out_len);

// Swept point at `index`.
//
// # Safety
// `region` must be a live handle; `out_point` valid for writes.
enum TwrcStatus twrc_region_point(const struct TwrcRegion *region,
                                  size_t index,
                                  struct TwrcPoint *out_point);

// Largest `R` with `(R, R)` inside the region.
//
// # Safety
// `region` must be a live handle; `out_rate` valid for writes.
enum TwrcStatus twrc_region_symmetric_rate(const struct TwrcRegion *region, double *out_rate);

// Release a region handle. NULL is ignored.
//
// # Safety
// `region` must be NULL or a handle not yet freed.
void twrc_region_free(struct TwrcRegion *region);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWRC_H */
