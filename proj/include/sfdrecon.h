/* C interface of the stochastic fractional diffusion source-reconstruction
 * library. All entry points are thread-compatible; error messages are kept
 * in thread-local storage and remain valid until the next failing call on
 * the same thread. */
#ifndef SFDRECON_H
#define SFDRECON_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum sfd_status {
  SFD_OK = 0,
  SFD_ERR_CONFIG = 2,  /* invalid configuration or input file */
  SFD_ERR_NUMERIC = 3  /* numerical failure (non-convergence, ...) */
} sfd_status;

typedef struct sfd_config sfd_config;
typedef struct sfd_result sfd_result;

const char* sfd_version(void);

/* Message of the last failing call on this thread ("" if none). */
const char* sfd_last_error(void);

/* --------------------------------------------------------- configuration */
sfd_config* sfd_config_create(void);
void sfd_config_destroy(sfd_config* config);

/* Keys: preset alpha x0 T N m R epsilon sigma seed threads n_modes
 * volterra_tol volterra_max_iter outdir moments_file. */
sfd_status sfd_config_set(sfd_config* config, const char* key, const char* value);
sfd_status sfd_config_load_file(sfd_config* config, const char* path);
sfd_status sfd_config_get(const sfd_config* config, const char* key, char* buffer, size_t size);

/* ------------------------------------------------------- pipeline stages */
/* Each stage writes its output files into the configured outdir. */
sfd_status sfd_run_kernels(const sfd_config* config);
sfd_status sfd_run_forward(const sfd_config* config);
sfd_status sfd_run_ensemble(const sfd_config* config);
sfd_status sfd_run_moments(const sfd_config* config);
sfd_status sfd_run_invert(const sfd_config* config, sfd_result** result);
sfd_status sfd_run_experiment(const sfd_config* config, sfd_result** result);

/* values is a comma-separated list; axis is samples, epsilon or sigma. */
sfd_status sfd_run_sweep(const sfd_config* config, const char* axis, const char* values);

/* ----------------------------------------------------------------- result */
/* Metrics: er_g1 er_g2abs iterations_g1 iterations_g2 clamp_count.
 * Returns SFD_ERR_CONFIG for unknown names. */
sfd_status sfd_result_metric(const sfd_result* result, const char* name, double* value);
void sfd_result_destroy(sfd_result* result);

#ifdef __cplusplus
}
#endif

#endif /* SFDRECON_H */
