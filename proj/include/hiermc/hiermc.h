/* hiermc: hierarchical Bayesian effect pooling behind a plain C interface.
 *
 * All functions return hiermc_rc; every non-OK return leaves a human-readable
 * message retrievable with hiermc_last_error() (thread-local). Out-parameters are
 * written only on HIERMC_OK. Handles are opaque and must be released with the
 * matching _free (NULL is tolerated).
 */
#ifndef HIERMC_H
#define HIERMC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hiermc_rc {
  HIERMC_OK = 0,
  HIERMC_ERR_INVALID = 1,  /* bad argument / configuration */
  HIERMC_ERR_DOMAIN = 2,   /* value outside a mathematical domain */
  HIERMC_ERR_SHAPE = 3,    /* dimension mismatch */
  HIERMC_ERR_DATA = 4,     /* structurally invalid data */
  HIERMC_ERR_SAMPLING = 5  /* sampler could not produce a result */
} hiermc_rc;

const char* hiermc_version(void);

/* Message for the most recent failing call on this thread; never NULL. */
const char* hiermc_last_error(void);

/* ---------- site-level summary data ---------- */

typedef struct hiermc_sites hiermc_sites;

hiermc_rc hiermc_sites_create(const char* const* names, const double* tau_hat,
                              const double* sigma_hat, int32_t n_sites,
                              hiermc_sites** out);
void hiermc_sites_free(hiermc_sites* sites);
int32_t hiermc_sites_count(const hiermc_sites* sites);

/* ---------- household-level regression data ---------- */

typedef struct hiermc_data hiermc_data;

/* site_index is 1-based and must cover 1..n_sites contiguously; treatment is 0/1.
 * baseline may be NULL; when with_baseline is nonzero it must be present and the
 * design gains a third column. z is row-major n_sites x n_site_predictors and
 * must already contain any intercept column. */
hiermc_rc hiermc_data_create(const int32_t* site_index, const double* y,
                             const int32_t* treatment, const double* baseline,
                             int32_t n_households, const double* z, int32_t n_sites,
                             int32_t n_site_predictors, int32_t with_baseline,
                             hiermc_data** out);
void hiermc_data_free(hiermc_data* data);

/* Synthetic data from known truth. Shapes: gamma I x J (I = 2 without baseline,
 * 3 with), theta I, l_omega I x I row-major lower-triangular, u I x S, sigma S,
 * z S x J; households_per_site has S entries. beta_out (I x S, row-major) may be
 * NULL. */
hiermc_rc hiermc_synthetic_data(int32_t n_sites, const int32_t* households_per_site,
                                int32_t n_ind_predictors, int32_t n_site_predictors,
                                const double* gamma, const double* theta,
                                const double* l_omega, const double* u,
                                const double* sigma, const double* z, uint64_t seed,
                                double* beta_out, hiermc_data** out);

/* beta = gamma Z^T + diag(theta) L u, written row-major I x S. */
hiermc_rc hiermc_regression_coefficients(int32_t n_ind_predictors, int32_t n_sites,
                                         int32_t n_site_predictors,
                                         const double* gamma, const double* z,
                                         const double* theta, const double* l_omega,
                                         const double* u, double* beta_out);

/* ---------- sampler configuration ---------- */

typedef struct hiermc_config hiermc_config;

/* Defaults: 4 chains, 1000 warmup of 2000 iterations, seed 1, target accept 0.99,
 * max 32 leapfrog steps, divergence threshold 1000, metric adaptation on, no
 * step-size jitter. */
hiermc_rc hiermc_config_create(hiermc_config** out);
void hiermc_config_free(hiermc_config* config);

hiermc_rc hiermc_config_set_chains(hiermc_config* config, int32_t chains);
hiermc_rc hiermc_config_set_iterations(hiermc_config* config, int32_t warmup,
                                       int32_t total);
hiermc_rc hiermc_config_set_seed(hiermc_config* config, uint64_t seed);
hiermc_rc hiermc_config_set_target_accept(hiermc_config* config, double delta);
hiermc_rc hiermc_config_set_max_leapfrog(hiermc_config* config, int32_t steps);
hiermc_rc hiermc_config_set_divergence_threshold(hiermc_config* config, double value);
hiermc_rc hiermc_config_set_metric_adaptation(hiermc_config* config, int32_t enabled);
hiermc_rc hiermc_config_set_stepsize_jitter(hiermc_config* config, double jitter);

/* ---------- fitting ---------- */

typedef struct hiermc_fit hiermc_fit;

/* Random-effects pooling model over site summaries. Pass tau_prior_sd <= 0 or
 * sigma_prior_scale <= 0 to keep the defaults (sqrt(5) and 5). */
hiermc_rc hiermc_fit_pooling_model(const hiermc_sites* sites,
                                   const hiermc_config* config, double tau_prior_sd,
                                   double sigma_prior_scale, hiermc_fit** out);

typedef struct hiermc_regression_priors {
  double lkj_eta;            /* default 2 */
  double gamma_prior_sd;     /* default sqrt(5) */
  double theta_cauchy_scale; /* default 2.5 */
  double sigma_upper;        /* default 100000 */
} hiermc_regression_priors;

hiermc_rc hiermc_regression_priors_default(hiermc_regression_priors* out);

/* Varying-slopes regression over household data. priors may be NULL for defaults. */
hiermc_rc hiermc_fit_regression_model(const hiermc_data* data,
                                      const hiermc_config* config,
                                      const hiermc_regression_priors* priors,
                                      hiermc_fit** out);

void hiermc_fit_free(hiermc_fit* fit);

int32_t hiermc_fit_num_values(const hiermc_fit* fit);
const char* hiermc_fit_value_name(const hiermc_fit* fit, int32_t index);
/* -1 when absent. */
int32_t hiermc_fit_value_index(const hiermc_fit* fit, const char* name);
int32_t hiermc_fit_num_chains(const hiermc_fit* fit);
int32_t hiermc_fit_draws_per_chain(const hiermc_fit* fit);

/* Draws of one value, chain-major: out must hold chains * draws_per_chain. */
hiermc_rc hiermc_fit_extract(const hiermc_fit* fit, int32_t value_index, double* out);

typedef struct hiermc_summary {
  double mean, sd;
  double q025, q25, q50, q75, q975;
  double rhat; /* 1.0 with degenerate flag for constant values */
  double ess;
  int32_t rhat_degenerate;
  int32_t ess_degenerate;
} hiermc_summary;

hiermc_rc hiermc_fit_summary(const hiermc_fit* fit, int32_t value_index,
                             hiermc_summary* out);

/* Largest non-degenerate split R-hat across all values. */
hiermc_rc hiermc_fit_max_rhat(const hiermc_fit* fit, double* out);

/* Post-warmup divergence count per chain: out must hold num_chains entries. */
hiermc_rc hiermc_fit_divergences(const hiermc_fit* fit, int32_t* out);
/* Warmup-phase divergence count per chain. */
hiermc_rc hiermc_fit_warmup_divergences(const hiermc_fit* fit, int32_t* out);
/* Adapted step size per chain. */
hiermc_rc hiermc_fit_step_sizes(const hiermc_fit* fit, double* out);
/* Post-warmup acceptance rate per chain. */
hiermc_rc hiermc_fit_accept_rates(const hiermc_fit* fit, double* out);

/* ---------- pooling and sensitivity ---------- */

/* omega_out must hold one entry per site. The fit must expose a "sigma" value. */
hiermc_rc hiermc_pooling(const hiermc_fit* fit, const hiermc_sites* sites,
                         double* omega_out, double* sigma_tilde_out,
                         double* omega_bar_out);

typedef struct hiermc_scenario {
  const char* label;         /* may be NULL (empty label) */
  double tau_factor;         /* 1.0 for none */
  double sigma_factor;       /* 1.0 for none */
  const char* equalize_site; /* NULL for none */
} hiermc_scenario;

/* Refits per scenario. Per-row outputs: sigma_tilde/omega_bar are NaN and ok 0 for
 * rows whose fit failed; the call itself still returns HIERMC_OK in that case. */
hiermc_rc hiermc_sensitivity(const hiermc_sites* sites, const hiermc_config* config,
                             double tau_prior_sd, double sigma_prior_scale,
                             const hiermc_scenario* scenarios, int32_t n_scenarios,
                             double* sigma_tilde_out, double* omega_bar_out,
                             int32_t* ok_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HIERMC_H */
