/*
 * leadsim — inventory policy simulation and optimization toolkit.
 *
 * C interface of the shared library. All objects are opaque handles owned
 * by the library; every fallible call returns a leadsim_status and leaves a
 * description of the most recent failure in leadsim_last_error() (thread
 * local). Status values match the CLI exit codes.
 */
#ifndef LEADSIM_H
#define LEADSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LEADSIM_API __declspec(dllexport)
#else
#define LEADSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum leadsim_status {
  LEADSIM_OK = 0,
  LEADSIM_ERR_CONFIG = 2,  /* invalid configuration or arguments */
  LEADSIM_ERR_RUNTIME = 3  /* runtime fault (non-convergence, I/O, ...) */
} leadsim_status;

typedef struct leadsim_config leadsim_config;
typedef struct leadsim_result leadsim_result;
typedef struct leadsim_sweep leadsim_sweep;
typedef struct leadsim_mdp leadsim_mdp;

LEADSIM_API const char* leadsim_version(void);
LEADSIM_API const char* leadsim_last_error(void);

/* ---- configuration ----------------------------------------------------- */

LEADSIM_API leadsim_status leadsim_config_parse(const char* json_text, leadsim_config** out);
LEADSIM_API leadsim_status leadsim_config_load(const char* path, leadsim_config** out);

/* Published parameter grids: table "table1".."table6"; row is the mean
 * lead-time demand ("2".."2000") or, for table3, the cost pair
 * ("h9t1".."h1t9"). */
LEADSIM_API leadsim_status leadsim_config_preset(const char* table, const char* row,
                                                 leadsim_config** out);

/* Sets a dotted-path key such as "protocol.seed" or "policy.gamma". */
LEADSIM_API leadsim_status leadsim_config_set(leadsim_config* config, const char* key,
                                              const char* value);

/* Canonical JSON of the config. Writes up to cap bytes (NUL-terminated) and
 * stores the full length in *needed. */
LEADSIM_API leadsim_status leadsim_config_dump(const leadsim_config* config, char* buf,
                                               size_t cap, size_t* needed);

/* Resolved scalar facts about the config. Keys: "r", "beta", "lead_demand",
 * "h", "theta", "gamma", "f", "x_star", "gamma_x_star", "base", "cbs_base",
 * "horizon", "warmup", "replications", "seed", "policy_kind" (0 gbs, 1 cbs,
 * 2 artificial). */
LEADSIM_API leadsim_status leadsim_config_info(const leadsim_config* config, const char* key,
                                               double* out);

LEADSIM_API void leadsim_config_free(leadsim_config* config);

/* ---- simulation --------------------------------------------------------- */

/* Runs the configured experiment: the event-calendar simulation for gbs and
 * cbs policies, the birth-death artificial process otherwise. */
LEADSIM_API leadsim_status leadsim_simulate(const leadsim_config* config, leadsim_result** out);

typedef enum leadsim_stat {
  LEADSIM_STAT_AVG_COST = 0,
  LEADSIM_STAT_MEAN_POS = 1,
  LEADSIM_STAT_MEAN_NEG = 2,
  LEADSIM_STAT_MEAN_Y = 3,
  LEADSIM_STAT_VAR_Y = 4,
  LEADSIM_STAT_MEAN_Z = 5,
  LEADSIM_STAT_VAR_Z = 6,
  LEADSIM_STAT_MEAN_GAP = 7,
  LEADSIM_STAT_MAX_GAP = 8,
  LEADSIM_STAT_EVENTS = 9
} leadsim_stat;

LEADSIM_API int leadsim_result_replications(const leadsim_result* result);

/* Statistic of one replication (0-based index). */
LEADSIM_API leadsim_status leadsim_result_rep_stat(const leadsim_result* result, int rep,
                                                   leadsim_stat stat, double* out);

/* Aggregate across replications: mean and standard error. Either output
 * pointer may be NULL. */
LEADSIM_API leadsim_status leadsim_result_agg(const leadsim_result* result, leadsim_stat stat,
                                              double* mean, double* se);

LEADSIM_API void leadsim_result_free(leadsim_result* result);

/* ---- gamma sweep -------------------------------------------------------- */

/* Cost-vs-gamma curve on [lo, hi] with the given step, common random
 * numbers across grid points, x* re-derived per gamma. */
LEADSIM_API leadsim_status leadsim_sweep_gamma(const leadsim_config* config, double lo,
                                               double hi, double step, leadsim_sweep** out);
LEADSIM_API int leadsim_sweep_points(const leadsim_sweep* sweep);
LEADSIM_API leadsim_status leadsim_sweep_point(const leadsim_sweep* sweep, int index,
                                               double* gamma, double* cost, double* se);
LEADSIM_API int leadsim_sweep_best(const leadsim_sweep* sweep);
LEADSIM_API void leadsim_sweep_free(leadsim_sweep* sweep);

/* ---- average-cost MDP benchmark ----------------------------------------- */

/* Solves the truncated average-cost model for the config's system and cost
 * parameters (exponential lead times only), enlarging the truncation until
 * the optimum stabilizes. */
LEADSIM_API leadsim_status leadsim_mdp_solve(const leadsim_config* config, leadsim_mdp** out);
LEADSIM_API double leadsim_mdp_avg_cost(const leadsim_mdp* mdp);
LEADSIM_API leadsim_status leadsim_mdp_counts(const leadsim_mdp* mdp, int64_t* states,
                                              int64_t* state_actions);
LEADSIM_API leadsim_status leadsim_mdp_target_range(const leadsim_mdp* mdp, int64_t* y_min,
                                                    int64_t* y_max);
LEADSIM_API leadsim_status leadsim_mdp_target_level(const leadsim_mdp* mdp, int64_t y,
                                                    int64_t* level);
LEADSIM_API int64_t leadsim_mdp_target_violations(const leadsim_mdp* mdp);
LEADSIM_API leadsim_status leadsim_mdp_export_lp(const leadsim_mdp* mdp, const char* path);
LEADSIM_API void leadsim_mdp_free(leadsim_mdp* mdp);

/* ---- helpers ------------------------------------------------------------ */

/* ceil(T(y)) of the config's policy, for target comparisons. */
LEADSIM_API leadsim_status leadsim_policy_target(const leadsim_config* config, int64_t y,
                                                 double* target);

/* Least squares of ln y on ln x; n >= 2, positive data. */
LEADSIM_API leadsim_status leadsim_fit_loglog(const double* x, const double* y, int n,
                                              double* intercept, double* slope,
                                              double* r_squared);

LEADSIM_API leadsim_status leadsim_inv_norm_cdf(double p, double* out);

#ifdef __cplusplus
}
#endif

#endif /* LEADSIM_H */
