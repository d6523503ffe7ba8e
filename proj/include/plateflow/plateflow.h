/*
 * (C) Copyright 2026 plateflow developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#ifndef PLATEFLOW_H
#define PLATEFLOW_H

/* C interface to libplateflow.  Objects are opaque handles released with
 * their matching *_free function; every call returns a pf_status and the
 * message of the most recent failure on the calling thread is available from
 * pf_last_error(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PF_API __declspec(dllexport)
#else
#define PF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_ERR_INVALID_ARGUMENT = 1,
  PF_ERR_CONFIG = 2,
  PF_ERR_HYPOTHESIS = 3,     /* inadmissible parameters or nonlinearity */
  PF_ERR_SOLVER = 4,         /* blow-up or divergence */
  PF_ERR_NON_HURWITZ = 5,
  PF_ERR_FIT = 6,            /* window too small or non-positive samples */
  PF_ERR_IO = 7,
  PF_ERR_INTERNAL = 8
} pf_status;

typedef enum pf_command {
  PF_CMD_SIMULATE = 0,
  PF_CMD_PICARD = 1,
  PF_CMD_SPECTRUM = 2,
  PF_CMD_DECAY_FIT = 3,
  PF_CMD_CHECK = 4,
  PF_CMD_CONVERGENCE = 5
} pf_command;

typedef enum pf_fit_method { PF_FIT_REGRESSION = 0, PF_FIT_ENVELOPE = 1 } pf_fit_method;

typedef struct pf_config pf_config;
typedef struct pf_trajectory pf_trajectory;
typedef struct pf_outcome pf_outcome;

typedef struct pf_decay_fit {
  double t_lo;
  double t_hi;
  double omega_fit;
  double intercept;
  double r2;
  size_t points;
} pf_decay_fit;

typedef struct pf_hypotheses {
  int small_data;
  int large_data;
  int omega_admissible;
  int trace_boundary_case;
  double spectral_bound;
  double omega_max;
} pf_hypotheses;

PF_API const char* pf_version(void);
PF_API const char* pf_last_error(void);
/* Process exit code for a status: 0, 2 (config), 3 (hypothesis), 4 (solver). */
PF_API int pf_exit_code(pf_status status);

/* ---- configuration ---- */
PF_API pf_status pf_config_load(const char* path, pf_config** out);
PF_API pf_status pf_config_parse(const char* text, pf_config** out);
/* Defaults only; useful with pf_config_set_hypothesis for `check`. */
PF_API pf_status pf_config_default(pf_config** out);
PF_API void pf_config_free(pf_config* cfg);
PF_API pf_status pf_config_set_seed(pf_config* cfg, uint64_t seed);
PF_API pf_status pf_config_set_output_dir(pf_config* cfg, const char* dir);
PF_API pf_status pf_config_set_force(pf_config* cfg, int force);
/* Overrides n, p, mu, omega; NaN (or n <= 0) leaves a value unchanged. */
PF_API pf_status pf_config_set_hypothesis(pf_config* cfg, int n, double p,
                                          double mu, double omega);

/* ---- direct computations ---- */
/* Eigenvalues of a row-major 3x3 matrix, sorted by real part.  Returns
 * PF_ERR_NON_HURWITZ (with the values filled) if some real part is <= 0. */
PF_API pf_status pf_eigenvalues(const double m[9], double re[3], double im[3]);
PF_API pf_status pf_spectrum(const pf_config* cfg, double re[3], double im[3],
                             double* spectral_bound, double* omega_max);
PF_API pf_status pf_check_params(int n, double p, double mu, double omega,
                                 double a, pf_hypotheses* out);
PF_API pf_status pf_fit_decay(const double* t, const double* y, size_t count,
                              double t_lo, double t_hi, pf_fit_method method,
                              pf_decay_fit* out);

/* ---- trajectories ---- */
PF_API pf_status pf_simulate(const pf_config* cfg, pf_trajectory** out);
PF_API pf_status pf_picard(const pf_config* cfg, pf_trajectory** out);
PF_API void pf_trajectory_free(pf_trajectory* traj);
PF_API size_t pf_trajectory_size(const pf_trajectory* traj);
/* 0 completed, 1 blowup, 2 diverged */
PF_API int pf_trajectory_status(const pf_trajectory* traj);
/* Column names as in the trajectory CSV: t, E, D, l2_Z, l2_U, l2_Theta,
 * norm_Xpmu, norm_Xp.  `out` must hold pf_trajectory_size() values. */
PF_API pf_status pf_trajectory_column(const pf_trajectory* traj,
                                      const char* name, double* out);

/* ---- full experiments ---- */
/* Runs a command and writes its files.  Solver failures still return PF_OK
 * with the failure reflected in pf_outcome_exit_code. */
PF_API pf_status pf_run(const pf_config* cfg, pf_command cmd,
                        const char* trajectory_csv, pf_outcome** out);
PF_API void pf_outcome_free(pf_outcome* outcome);
PF_API int pf_outcome_exit_code(const pf_outcome* outcome);
PF_API const char* pf_outcome_report(const pf_outcome* outcome);
PF_API size_t pf_outcome_file_count(const pf_outcome* outcome);
PF_API const char* pf_outcome_file(const pf_outcome* outcome, size_t i);

#ifdef __cplusplus
}
#endif

#endif /* PLATEFLOW_H */
