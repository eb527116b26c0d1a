/* stripe-lab C API: opaque handles and status codes over the simulation core.
 *
 * Every function returns SL_OK on success; on failure it returns a status code
 * and leaves a message retrievable with sl_last_error() (thread-local).
 * Handles are created by sl_*_parse/run functions and released with the
 * matching sl_*_free; passing NULL to a free function is a no-op.
 */
#ifndef STRIPELAB_H
#define STRIPELAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sl_status {
    SL_OK = 0,
    SL_ERR_CONFIG = 2,    /* config parse or validation failure */
    SL_ERR_DIVERGED = 3,  /* numerical divergence during a run */
    SL_ERR_INVALID = 4,   /* invalid argument outside config handling */
    SL_ERR_IO = 5,
    SL_ERR_INTERNAL = 6
} sl_status;

typedef struct sl_config sl_config;
typedef struct sl_result sl_result;

const char* sl_status_name(sl_status status);
const char* sl_last_error(void);

/* ---- configuration ---- */
sl_status sl_config_parse_text(const char* text, sl_config** out);
sl_status sl_config_parse_file(const char* path, sl_config** out);
/* Canonical rendering; free the string with sl_string_free. */
sl_status sl_config_render(const sl_config* config, char** out_text);
void sl_config_free(sl_config* config);
void sl_string_free(char* text);

/* ---- experiments ---- */
/* Writes diagnostics.csv, snapshots and summary.json under out_dir
 * (config [output] dir when out_dir is NULL or empty). Sweeps fan out into one
 * subdirectory per value plus sweep_summary.csv. result may be NULL; for
 * sweeps no result handle is produced. */
sl_status sl_run_experiment(const sl_config* config, const char* out_dir, int threads,
                            uint64_t seed, sl_result** result);
sl_status sl_result_metric(const sl_result* result, const char* key, double* out);
sl_status sl_result_json(const sl_result* result, char** out_text);
void sl_result_free(sl_result* result);

/* ---- closed forms ---- */
/* Dispersion table CSV for the configured model: rows m in [0, m_max]
 * (and m_z in [-mz_max, mz_max], z fixed, for the kinetic model). */
sl_status sl_dispersion_table(const sl_config* config, double n0, double z, int m_max, int mz_max,
                              const char* csv_path);

/* Total-mass ODE closed form sampled at n_rows uniform times on [0, t_end]. */
sl_status sl_mass_ode_table(const sl_config* config, double a_rho0, double a_h0, double a_n0,
                            double n0, double t_end, int n_rows, const char* csv_path);

/* Dissipativity certificate at rho_a. certified is 0/1; lambda/mu are the
 * certificate weights, alpha_min the least eigenvalue of the certificate
 * matrix, lambda_b the closed-form threshold, n_samples the sampling density
 * behind the hypothesis constants. Output pointers may be NULL. */
sl_status sl_certify(const sl_config* config, double rho_a, int* certified, double* lambda,
                     double* mu, double* alpha_min, double* lambda_b, int* n_samples);

/* Local-lifespan lower bound T0 for initial energy E_in. */
sl_status sl_lifespan(double E_in, double eps, int s, double C, double* t0);

/* Same, with eps and the Sobolev index taken from the config's [params]. */
sl_status sl_lifespan_config(const sl_config* config, double E_in, double C, double* t0);

#ifdef __cplusplus
}
#endif

#endif /* STRIPELAB_H */
