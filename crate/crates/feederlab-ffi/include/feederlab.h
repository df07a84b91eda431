/* C ABI for the feederlab biased admission-market analysis library. */

#ifndef FEEDERLAB_H
#define FEEDERLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Student group tag.
 */
typedef enum FlGroup {
  /**
   * Perceived at true potential.
   */
  FL_GROUP_G1 = 1,
  /**
   * Perceived at `beta` times true potential.
   */
  FL_GROUP_G2 = 2,
} FlGroup;

/**
 * Unfairness measure selector for the optimizers.
 */
typedef enum FlMeasure {
  /**
   * Worst mistreatment.
   */
  FL_MEASURE_MM = 0,
  /**
   * Positive area under the displacement curve.
   */
  FL_MEASURE_PAUC = 1,
} FlMeasure;

/**
 * Status code returned by every FFI call.
 */
typedef enum FlStatus {
  FL_STATUS_OK = 0,
  /**
   * A parameter violated its domain; nothing was written.
   */
  FL_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The operation has a closed form only for Pareto potentials.
   */
  FL_STATUS_REQUIRES_PARETO = 2,
  /**
   * A required pointer was null.
   */
  FL_STATUS_NULL_POINTER = 3,
  /**
   * An internal panic was caught at the boundary.
   */
  FL_STATUS_INTERNAL_ERROR = 4,
} FlStatus;

/**
 * Opaque market handle (population split, bias factor, potential law).
 */
typedef struct FlMarket FlMarket;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a market with Pareto(1, `alpha`) potentials.
 */
enum FlStatus fl_market_new_pareto(double alpha, double beta, double p, struct FlMarket **out);

/**
 * Create a market with normal potentials.
 */
enum FlStatus fl_market_new_normal(double mean,
                                   double stddev,
                                   double beta,
                                   double p,
                                   struct FlMarket **out);

/**
 * Create a market with normal potentials renormalized to `[lower, upper]`.
 */
enum FlStatus fl_market_new_truncated_normal(double mean,
                                             double stddev,
                                             double lower,
                                             double upper,
                                             double beta,
                                             double p,
                                             struct FlMarket **out);

/**
 * Release a market handle. Null is accepted and ignored.
 */
void fl_market_free(struct FlMarket *market);

/**
 * Rank of a student with true potential `z` when schools see true
 * potentials (0 is the best school).
 */
enum FlStatus fl_rank_unbiased(const struct FlMarket *market_ptr, double z, double *out);

/**
 * Rank of a student under the biased matching.
 */
enum FlStatus fl_rank_biased(const struct FlMarket *market_ptr,
                             double z,
                             enum FlGroup group,
                             double *out);

/**
 * Rank shift caused by bias (positive means a worse school).
 */
enum FlStatus fl_displacement(const struct FlMarket *market_ptr,
                              double z,
                              enum FlGroup group,
                              double *out);

/**
 * Largest displacement suffered by a G2 student and where it occurs.
 */
enum FlStatus fl_max_displacement(const struct FlMarket *market_ptr, double *value, double *at_z);

/**
 * Perceived-potential admission cutoff of school `s` in `[0, 1]`.
 */
enum FlStatus fl_school_cutoff(const struct FlMarket *market_ptr, double s, double *out);

/**
 * Mean admitted true potential of school `s` without bias.
 */
enum FlStatus fl_utility_unbiased(const struct FlMarket *market_ptr, double s, double *out);

/**
 * Mean admitted true potential of school `s` under bias.
 */
enum FlStatus fl_utility_biased(const struct FlMarket *market_ptr, double s, double *out);

/**
 * Share of G2 students at school `s`, biased or unbiased matching.
 */
enum FlStatus fl_diversity(const struct FlMarket *market_ptr, double s, bool biased, double *out);

/**
 * School utilities under the three interviewing scenarios at capacity `iv`.
 */
enum FlStatus fl_interview_utilities(const struct FlMarket *market_ptr,
                                     double s,
                                     double iv,
                                     double *all_interview,
                                     double *solo_interview,
                                     double *solo_abstain);

/**
 * Rank of a student after debiasing the band `[z1, z2]` (NaN endpoints
 * for the empty band).
 */
enum FlStatus fl_rank_post_voucher(const struct FlMarket *market_ptr,
                                   double z1,
                                   double z2,
                                   double z,
                                   enum FlGroup group,
                                   double *out);

/**
 * Worst G2 mistreatment after debiasing the band.
 */
enum FlStatus fl_mistreatment_max(const struct FlMarket *market_ptr,
                                  double z1,
                                  double z2,
                                  double *out);

/**
 * Positive area under the displacement curve after debiasing the band.
 */
enum FlStatus fl_pauc(const struct FlMarket *market_ptr, double z1, double z2, double *out);

/**
 * Potential-law mass (budget) consumed by the band.
 */
enum FlStatus fl_budget_of_interval(const struct FlMarket *market_ptr,
                                    double z1,
                                    double z2,
                                    double *out);

/**
 * Closed-form optimal band for the budget under the chosen measure
 * (Pareto potentials only). NaN endpoints signal the empty band.
 */
enum FlStatus fl_optimal_interval(const struct FlMarket *market_ptr,
                                  enum FlMeasure measure,
                                  double c_hat,
                                  double *z1,
                                  double *z2,
                                  double *value_after,
                                  bool *assumption_satisfied);

/**
 * Sliding-window optimal band for any potential law.
 */
enum FlStatus fl_optimal_interval_numeric(const struct FlMarket *market_ptr,
                                          enum FlMeasure measure,
                                          double c_hat,
                                          size_t grid_size,
                                          double *z1,
                                          double *z2,
                                          double *value_after);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FEEDERLAB_H */
