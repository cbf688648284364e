/* SPDX-License-Identifier: Apache-2.0 */

/*
 * msfault C API.
 *
 * Every object is an opaque handle owned by the caller and released with its
 * *_free function (NULL is accepted). Functions return MSF_OK or an error
 * code; the message of the last failure on the calling thread is available
 * from msf_last_error(). Angles are in degrees throughout.
 */

#ifndef MSFAULT_MSFAULT_H
#define MSFAULT_MSFAULT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MSF_BUILDING_LIBRARY)
#define MSF_API __declspec(dllexport)
#else
#define MSF_API __declspec(dllimport)
#endif
#else
#define MSF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum msf_status {
  MSF_OK = 0,
  MSF_ERR_INVALID_ARGUMENT = 1,
  MSF_ERR_OUT_OF_RANGE = 2,
  MSF_ERR_PARSE = 3,
  MSF_ERR_IO = 4,
  MSF_ERR_RUNTIME = 5,
  MSF_ERR_NULL_POINTER = 6
} msf_status;

typedef struct msf_palette msf_palette;
typedef struct msf_coding msf_coding;
typedef struct msf_reflection msf_reflection;
typedef struct msf_pattern msf_pattern;
typedef struct msf_sweep msf_sweep;

MSF_API const char* msf_version(void);
/* Message of the most recent failure on this thread; "" if none. */
MSF_API const char* msf_last_error(void);
MSF_API const char* msf_status_name(msf_status status);

/* ---- geometry, target, angular grid ---- */

typedef struct msf_geometry {
  int n_rows;
  int n_cols;
  double cell_size_m;
  double frequency_hz;
} msf_geometry;

/* 15 x 15 cells, 2 mm, 25 GHz. */
MSF_API void msf_geometry_default(msf_geometry* geometry);

typedef struct msf_target {
  double theta_deg; /* [0, 90) */
  double phi_deg;   /* [0, 360) */
} msf_target;

typedef struct msf_angular {
  double theta_start_deg;
  double theta_step_deg;
  int n_theta;
  double phi_start_deg;
  double phi_step_deg;
  int n_phi;
} msf_angular;

/* theta 0..90 inclusive and phi 0..360 exclusive at `step_deg`. */
MSF_API msf_status msf_angular_hemisphere(double step_deg, msf_angular* out);

/* ---- palette ---- */

MSF_API msf_status msf_palette_default(msf_palette** out);
/* `labels` may be NULL (s0, s1, ...). */
MSF_API msf_status msf_palette_create(const double* gamma, const double* phi_deg, const char* const* labels, size_t n,
                                      msf_palette** out);
MSF_API msf_status msf_palette_load(const char* path, msf_palette** out);
MSF_API msf_status msf_palette_save(const msf_palette* palette, const char* path);
MSF_API size_t msf_palette_size(const msf_palette* palette);
MSF_API msf_status msf_palette_state(const msf_palette* palette, size_t index, double* gamma, double* phi_deg);
/* Nearest state by circular phase distance; ties go to the lower index. */
MSF_API msf_status msf_palette_nearest(const msf_palette* palette, double phi_deg, size_t* index);
MSF_API void msf_palette_free(msf_palette* palette);

/* ---- coding ---- */

/* `palette` may be NULL for the default palette. */
MSF_API msf_status msf_coding_generate(const msf_geometry* geometry, const msf_target* target,
                                       const msf_palette* palette, msf_coding** out);
MSF_API msf_status msf_coding_load(const char* path, msf_coding** out);
/* Path "-" writes to standard output. */
MSF_API msf_status msf_coding_save(const msf_coding* coding, const char* path);
MSF_API msf_status msf_coding_geometry(const msf_coding* coding, msf_geometry* out);
MSF_API msf_status msf_coding_target(const msf_coding* coding, msf_target* out);
MSF_API msf_status msf_coding_cell(const msf_coding* coding, int row, int col, int* state);
MSF_API void msf_coding_free(msf_coding* coding);

/* ---- fault scenarios ---- */

typedef enum msf_error_type {
  MSF_TYPE_STUCK = 0,
  MSF_TYPE_OUT_OF_STATE = 1,
  MSF_TYPE_DETERMINISTIC = 2,
  MSF_TYPE_BIASED = 3
} msf_error_type;

typedef enum msf_distribution {
  MSF_DIST_INDEPENDENT = 0,
  MSF_DIST_CLUSTERED = 1,
  MSF_DIST_ALIGNED = 2,
  MSF_DIST_STATE_SPECIFIC = 3
} msf_distribution;

typedef struct msf_scenario {
  msf_error_type type;
  msf_distribution distribution;
  double rate;
  uint64_t seed;
  int biased_delta;          /* Biased: state offset, default 1 */
  int det_has_value;         /* Deterministic: 0 means palette state 0 */
  double det_gamma;
  double det_phi_deg;
  int out_uniform_amplitude; /* OutOfState: amplitude uniform in [0, 1] instead of nominal */
  int cluster_has_seed;      /* Clustered: 0 means grid centre */
  int cluster_row;
  int cluster_col;
  const int* target_states;  /* StateSpecific: NULL means {1} */
  size_t n_target_states;
} msf_scenario;

MSF_API void msf_scenario_default(msf_scenario* scenario);
/* Sets type and distribution from a two-letter code such as "CD". */
MSF_API msf_status msf_scenario_from_acronym(const char* acronym, msf_scenario* scenario);

/* ---- reflection grids ---- */

MSF_API msf_status msf_reflection_from_coding(const msf_coding* coding, msf_reflection** out);
/* Applies `scenario` to `coding`; `n_faulty` may be NULL. */
MSF_API msf_status msf_inject(const msf_coding* coding, const msf_scenario* scenario, msf_reflection** out,
                              size_t* n_faulty);
MSF_API msf_status msf_reflection_load(const char* path, msf_reflection** out);
MSF_API msf_status msf_reflection_save(const msf_reflection* grid, const char* path);
MSF_API msf_status msf_reflection_cell(const msf_reflection* grid, int row, int col, double* gamma, double* phi_deg,
                                       int* faulty);
MSF_API void msf_reflection_free(msf_reflection* grid);

/* ---- far-field patterns ---- */

/* `angular` NULL means the 1 degree hemisphere; `reference` NULL means the
 * pattern's own maximum. */
MSF_API msf_status msf_pattern_evaluate(const msf_reflection* grid, const msf_angular* angular,
                                        const double* reference, msf_pattern** out);
MSF_API msf_status msf_pattern_load_csv(const char* path, msf_pattern** out);
MSF_API msf_status msf_pattern_save_csv(const msf_pattern* pattern, const char* path, double floor_db);
MSF_API msf_status msf_pattern_angular(const msf_pattern* pattern, msf_angular* out);
MSF_API msf_status msf_pattern_value(const msf_pattern* pattern, int i_theta, int i_phi, double* magnitude);
MSF_API msf_status msf_pattern_reference(const msf_pattern* pattern, double* reference);
MSF_API msf_status msf_pattern_argmax(const msf_pattern* pattern, double* theta_deg, double* phi_deg,
                                      double* magnitude);
MSF_API void msf_pattern_free(msf_pattern* pattern);

/* ---- metrics ---- */

enum {
  MSF_FLAG_POLE = 1,
  MSF_FLAG_SINGLE_LOBE = 2,
  MSF_FLAG_HPBW_CAPPED = 4,
  MSF_FLAG_ERROR = 8
};

typedef enum msf_sla_convention { MSF_SLA_INTEGRATED_POWER = 0, MSF_SLA_PEAK_SUM = 1 } msf_sla_convention;

typedef struct msf_metrics_options {
  double lobe_floor_db;
  double floor_db;
  double refine_step_deg;
  double refine_half_window_deg;
  msf_sla_convention sla;
  double hpbw_level_db;
  double hpbw_march_step_deg;
  double pole_theta_deg;
} msf_metrics_options;

MSF_API void msf_metrics_options_default(msf_metrics_options* options);

typedef struct msf_metrics {
  double td_deg;
  double d_target_db;
  double d_actual_db;
  double sll_db;
  double sll_max_db;
  double sla_db;
  double hpbw_deg;
  double theta_a_deg;
  double phi_a_deg;
  double peak_magnitude;
  int n_lobes;
  unsigned flags;
} msf_metrics;

/* Metrics of a reflection grid with peaks refined on the exact field.
 * `angular` and `options` may be NULL. */
MSF_API msf_status msf_metrics_compute(const msf_reflection* grid, const msf_angular* angular,
                                       const msf_target* target, double reference,
                                       const msf_metrics_options* options, msf_metrics* out);
/* Metrics from samples alone (bilinear interpolation, no refinement). */
MSF_API msf_status msf_metrics_from_pattern(const msf_pattern* pattern, const msf_target* target, double reference,
                                            const msf_metrics_options* options, msf_metrics* out);
/* Fault-free metrics of `coding`; `reference` receives the golden peak
 * magnitude used to normalize faulty patterns. Either output may be NULL. */
MSF_API msf_status msf_golden(const msf_coding* coding, const msf_angular* angular, const msf_metrics_options* options,
                              msf_metrics* out, double* reference);
/* Writes "pole|single_lobe" style text; returns the length needed. */
MSF_API size_t msf_flags_string(unsigned flags, char* buffer, size_t size);

/* ---- Monte-Carlo sweeps ---- */

typedef struct msf_sweep_plan {
  const char* const* scenarios; /* acronyms */
  size_t n_scenarios;
  const double* rates; /* ascending, in [0, 1] */
  size_t n_rates;
  int trials;
  uint64_t root_seed;
  int jobs;
  int keep_trials;
} msf_sweep_plan;

/* Eight table scenarios, rates 0..0.5 step 0.01, 100 trials, seed 0, 1 job.
 * The arrays point to static storage. */
MSF_API void msf_sweep_plan_default(msf_sweep_plan* plan);

typedef void (*msf_progress_fn)(size_t done, size_t total, void* user);

MSF_API msf_status msf_sweep_run(const msf_coding* coding, const msf_sweep_plan* plan, const msf_angular* angular,
                                 const msf_metrics_options* options, msf_progress_fn progress, void* user,
                                 msf_sweep** out);

typedef struct msf_summary_row {
  char scenario[8];
  double rate;
  char metric[16];
  double mean;
  double std;
  double min;
  double max;
  int n;
  int flagged;
} msf_summary_row;

typedef struct msf_trial_row {
  char scenario[8];
  double rate;
  int trial;
  uint64_t seed;
  double emergent_rate;
  msf_metrics metrics;
} msf_trial_row;

MSF_API size_t msf_sweep_summary_count(const msf_sweep* sweep);
MSF_API msf_status msf_sweep_summary_row(const msf_sweep* sweep, size_t index, msf_summary_row* out);
/* Row for (scenario, rate, metric); rate matched within 1e-9. */
MSF_API msf_status msf_sweep_lookup(const msf_sweep* sweep, const char* scenario, double rate, const char* metric,
                                    msf_summary_row* out);
MSF_API size_t msf_sweep_trial_count(const msf_sweep* sweep);
MSF_API msf_status msf_sweep_trial(const msf_sweep* sweep, size_t index, msf_trial_row* out);
MSF_API msf_status msf_sweep_golden(const msf_sweep* sweep, msf_metrics* out);
MSF_API int msf_sweep_errors(const msf_sweep* sweep);
MSF_API double msf_sweep_wall_seconds(const msf_sweep* sweep);
MSF_API msf_status msf_sweep_write_csv(const msf_sweep* sweep, const char* path);
MSF_API msf_status msf_sweep_write_trials_csv(const msf_sweep* sweep, const char* path);
MSF_API msf_status msf_sweep_write_manifest(const msf_sweep* sweep, const char* path);
MSF_API void msf_sweep_free(msf_sweep* sweep);

#ifdef __cplusplus
}
#endif

#endif /* MSFAULT_MSFAULT_H */
