#ifndef LQR_RECON_H
#define LQR_RECON_H

/* C interface to the LQR reconstruction library.
 *
 * Objects are opaque handles created by *_create / *_load functions and
 * released with the matching *_free. Every fallible call returns an
 * lqrr_status; on failure lqrr_last_error() holds a message for the calling
 * thread. Matrices cross the boundary as row-major double arrays. Strings
 * returned through char** are owned by the caller (lqrr_string_free). */

#include <stddef.h>
#include <stdint.h>

#if defined(LQRR_BUILDING_LIBRARY)
#define LQRR_API __attribute__((visibility("default")))
#else
#define LQRR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lqrr_status {
  LQRR_OK = 0,
  LQRR_ERR_INTERNAL = 1,
  LQRR_ERR_STRUCTURAL = 2,
  LQRR_ERR_PRECONDITION = 3,
  LQRR_ERR_NUMERICAL = 4,
  LQRR_ERR_DEGENERATE_GEOMETRY = 5,
  LQRR_ERR_RANK_DEFICIENT = 6,
  LQRR_ERR_NOT_CONVERGED = 7,
  LQRR_ERR_DOMAIN = 8,
  LQRR_ERR_AMBIGUOUS = 9,
  LQRR_ERR_INDEFINITE = 10,
  LQRR_ERR_SEARCH_FAILED = 11,
  LQRR_ERR_IO = 12,
  LQRR_ERR_PARSE = 13,
  LQRR_ERR_NULL_ARGUMENT = 14
} lqrr_status;

typedef enum lqrr_setting { LQRR_SETTING_FINAL_STATE = 0, LQRR_SETTING_CLASSIC = 1 } lqrr_setting;

typedef struct lqrr_system lqrr_system;
typedef struct lqrr_objective lqrr_objective;
typedef struct lqrr_dataset lqrr_dataset;
typedef struct lqrr_report lqrr_report;

LQRR_API const char* lqrr_version(void);
LQRR_API const char* lqrr_status_name(lqrr_status status);
/* Message of the last failing call on this thread; "" when none. */
LQRR_API const char* lqrr_last_error(void);
LQRR_API void lqrr_string_free(char* s);

/* --- system and objective --- */

/* A: n x n, B: n x m, C: n x n (NULL = identity), noise_std: n (NULL = 0). */
LQRR_API lqrr_status lqrr_system_create(int n, int m, const double* a, const double* b,
                                        const double* c, const double* noise_std,
                                        lqrr_system** out);
LQRR_API lqrr_status lqrr_system_from_json(const char* json, lqrr_system** out);
LQRR_API lqrr_status lqrr_system_to_json(const lqrr_system* sys, char** out);
LQRR_API void lqrr_system_free(lqrr_system* sys);
LQRR_API int lqrr_system_state_dim(const lqrr_system* sys);
LQRR_API int lqrr_system_input_dim(const lqrr_system* sys);
/* *passed = 1 when controllable, B full column rank and A, C invertible.
 * A multi-line description of failures is returned in *details if non-NULL. */
LQRR_API lqrr_status lqrr_system_validate(const lqrr_system* sys, int* passed, char** details);

/* H, Q: n x n, R: m x m. In the final-state setting H and Q may be NULL. */
LQRR_API lqrr_status lqrr_objective_create(int n, int m, const double* h, const double* q,
                                           const double* r, lqrr_setting setting,
                                           lqrr_objective** out);
LQRR_API lqrr_status lqrr_objective_from_json(const char* json, lqrr_objective** out);
LQRR_API void lqrr_objective_free(lqrr_objective* obj);

/* --- forward problem --- */

/* gains_out: horizon * m * n doubles, K_0 first. */
LQRR_API lqrr_status lqrr_riccati_gains(const lqrr_system* sys, const lqrr_objective* obj,
                                        int horizon, double* gains_out);
/* p_out: n * n, k_out: m * n; either may be NULL. */
LQRR_API lqrr_status lqrr_dare(const lqrr_system* sys, const lqrr_objective* obj, double* p_out,
                               double* k_out);

/* --- datasets --- */

/* trajectories < 0 keeps the configuration's count. */
LQRR_API lqrr_status lqrr_dataset_generate(const char* config_json, uint64_t seed,
                                           int trajectories, lqrr_dataset** out);
LQRR_API lqrr_status lqrr_dataset_write(const lqrr_dataset* data, const char* dir);
LQRR_API lqrr_status lqrr_dataset_load(const char* dir, lqrr_dataset** out);
LQRR_API void lqrr_dataset_free(lqrr_dataset* data);
LQRR_API int lqrr_dataset_history_count(const lqrr_dataset* data);
LQRR_API int lqrr_dataset_probe_count(const lqrr_dataset* data);
LQRR_API int lqrr_dataset_observed_steps(const lqrr_dataset* data);
LQRR_API int lqrr_dataset_true_horizon(const lqrr_dataset* data);
/* The dataset's system. The caller frees the copy. */
LQRR_API lqrr_status lqrr_dataset_system(const lqrr_dataset* data, lqrr_system** out);

/* --- pipeline --- */

typedef struct lqrr_pipeline_options {
  lqrr_setting setting;
  int theta;        /* horizon search step */
  int window;       /* T, classic setting */
  int gain_suffix;  /* 0 = shortest history trajectory */
  int use_probes;   /* line-fit the target on the dataset's probe trajectories */
} lqrr_pipeline_options;

LQRR_API void lqrr_pipeline_options_init(lqrr_pipeline_options* options);

/* Always creates *out when the arguments are valid. On a stage failure the
 * report is partial, lqrr_report_failed_stage names the stage and the stage's
 * error is returned. */
LQRR_API lqrr_status lqrr_run_pipeline(const lqrr_dataset* data,
                                       const lqrr_pipeline_options* options, lqrr_report** out);
LQRR_API void lqrr_report_free(lqrr_report* report);
/* "" when every stage completed. */
LQRR_API const char* lqrr_report_failed_stage(const lqrr_report* report);
LQRR_API int lqrr_report_n_star(const lqrr_report* report);
/* Copies up to len entries; returns the full length. */
LQRR_API int lqrr_report_mu0(const lqrr_report* report, double* out, int len);
LQRR_API int lqrr_report_target(const lqrr_report* report, double* out, int len);
LQRR_API lqrr_status lqrr_report_to_json(const lqrr_report* report, char** out);

/* --- benchmarks --- */

/* Writes one CSV per figure into out_dir; *summary (optional) lists
 * "name,rows,path" lines. */
LQRR_API lqrr_status lqrr_bench_run(const char* sweep_json, const char* out_dir, int jobs,
                                    char** summary);

#ifdef __cplusplus
}
#endif

#endif
