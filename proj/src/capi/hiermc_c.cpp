#include "hiermc/hiermc.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/matrix.hpp"
#include "diagnostics/diagnostics.hpp"
#include "diagnostics/pooling.hpp"
#include "diagnostics/sensitivity.hpp"
#include "models/hier_regression.hpp"
#include "models/random_effects.hpp"
#include "models/site_summary.hpp"
#include "models/synthetic.hpp"
#include "sampler/config.hpp"
#include "sampler/runner.hpp"

using namespace hiermc;

namespace {

thread_local std::string g_last_error = "no error";

void set_error(const char* msg) { g_last_error = msg; }

// Runs `fn`, translating exceptions into return codes + thread-local message.
template <class Fn>
hiermc_rc guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    set_error(e.what());
    return HIERMC_ERR_DOMAIN;
  } catch (const ShapeError& e) {
    set_error(e.what());
    return HIERMC_ERR_SHAPE;
  } catch (const DataError& e) {
    set_error(e.what());
    return HIERMC_ERR_DATA;
  } catch (const SamplingError& e) {
    set_error(e.what());
    return HIERMC_ERR_SAMPLING;
  } catch (const EvaluationError& e) {
    set_error(e.what());
    return HIERMC_ERR_DOMAIN;
  } catch (const std::exception& e) {
    set_error(e.what());
    return HIERMC_ERR_INVALID;
  }
}

hiermc_rc invalid(const char* msg) {
  set_error(msg);
  return HIERMC_ERR_INVALID;
}

Matrix to_matrix(const double* data, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  std::memcpy(m.data(), data, rows * cols * sizeof(double));
  return m;
}

}  // namespace

struct hiermc_sites {
  std::vector<models::SiteSummary> sites;
};

struct hiermc_data {
  models::RegressionData data;
};

struct hiermc_config {
  sampler::SamplerConfig config;
};

struct hiermc_fit {
  sampler::ChainDraws draws;
  std::vector<diagnostics::ParamSummary> summaries;
};

namespace {

hiermc_fit* make_fit(sampler::ChainDraws draws) {
  auto* fit = new hiermc_fit{std::move(draws), {}};
  fit->summaries = diagnostics::summarize(fit->draws);
  return fit;
}

}  // namespace

extern "C" {

const char* hiermc_version(void) { return "0.1.0"; }

const char* hiermc_last_error(void) { return g_last_error.c_str(); }

hiermc_rc hiermc_sites_create(const char* const* names, const double* tau_hat,
                              const double* sigma_hat, int32_t n_sites,
                              hiermc_sites** out) {
  if (!names || !tau_hat || !sigma_hat || !out)
    return invalid("hiermc_sites_create: null argument");
  if (n_sites <= 0) return invalid("hiermc_sites_create: n_sites must be positive");
  return guarded([&] {
    std::vector<models::SiteSummary> sites(n_sites);
    for (int32_t i = 0; i < n_sites; ++i) {
      if (!names[i]) throw DataError("site name is null");
      sites[i] = {names[i], tau_hat[i], sigma_hat[i]};
    }
    models::validate_sites(sites);
    *out = new hiermc_sites{std::move(sites)};
    return HIERMC_OK;
  });
}

void hiermc_sites_free(hiermc_sites* sites) { delete sites; }

int32_t hiermc_sites_count(const hiermc_sites* sites) {
  return sites ? static_cast<int32_t>(sites->sites.size()) : 0;
}

hiermc_rc hiermc_data_create(const int32_t* site_index, const double* y,
                             const int32_t* treatment, const double* baseline,
                             int32_t n_households, const double* z, int32_t n_sites,
                             int32_t n_site_predictors, int32_t with_baseline,
                             hiermc_data** out) {
  if (!site_index || !y || !treatment || !z || !out)
    return invalid("hiermc_data_create: null argument");
  if (n_households <= 0) return invalid("hiermc_data_create: no households");
  if (n_sites <= 0 || n_site_predictors <= 0)
    return invalid("hiermc_data_create: bad predictor matrix shape");
  if (with_baseline && !baseline)
    return invalid("hiermc_data_create: baseline requested but not provided");
  return guarded([&] {
    std::vector<models::HouseholdRecord> records(n_households);
    for (int32_t i = 0; i < n_households; ++i) {
      records[i].site_index = site_index[i];
      records[i].outcome = y[i];
      records[i].treatment = treatment[i];
      if (baseline) records[i].baseline = baseline[i];
    }
    models::RegressionData data = models::assemble_regression_data(
        records, to_matrix(z, n_sites, n_site_predictors), with_baseline != 0);
    if (data.num_sites != static_cast<std::size_t>(n_sites))
      throw DataError("site indices do not cover 1.." + std::to_string(n_sites));
    *out = new hiermc_data{std::move(data)};
    return HIERMC_OK;
  });
}

void hiermc_data_free(hiermc_data* data) { delete data; }

hiermc_rc hiermc_synthetic_data(int32_t n_sites, const int32_t* households_per_site,
                                int32_t n_ind_predictors, int32_t n_site_predictors,
                                const double* gamma, const double* theta,
                                const double* l_omega, const double* u,
                                const double* sigma, const double* z, uint64_t seed,
                                double* beta_out, hiermc_data** out) {
  if (!households_per_site || !gamma || !theta || !l_omega || !u || !sigma || !z ||
      !out)
    return invalid("hiermc_synthetic_data: null argument");
  if (n_sites <= 0 || n_ind_predictors <= 0 || n_site_predictors <= 0)
    return invalid("hiermc_synthetic_data: bad shape");
  return guarded([&] {
    const std::size_t I = n_ind_predictors, S = n_sites, J = n_site_predictors;
    models::SyntheticTruth truth;
    truth.gamma = to_matrix(gamma, I, J);
    truth.theta.assign(theta, theta + I);
    truth.l_omega = to_matrix(l_omega, I, I);
    truth.u = to_matrix(u, I, S);
    truth.sigma.assign(sigma, sigma + S);
    truth.z = to_matrix(z, S, J);
    std::vector<int> sizes(households_per_site, households_per_site + S);
    models::SyntheticResult res = models::generate_households(truth, sizes, seed);
    if (beta_out)
      std::memcpy(beta_out, res.beta.data(), I * S * sizeof(double));
    models::RegressionData data =
        models::assemble_regression_data(res.records, truth.z, I == 3);
    *out = new hiermc_data{std::move(data)};
    return HIERMC_OK;
  });
}

hiermc_rc hiermc_regression_coefficients(int32_t n_ind_predictors, int32_t n_sites,
                                         int32_t n_site_predictors,
                                         const double* gamma, const double* z,
                                         const double* theta, const double* l_omega,
                                         const double* u, double* beta_out) {
  if (!gamma || !z || !theta || !l_omega || !u || !beta_out)
    return invalid("hiermc_regression_coefficients: null argument");
  if (n_ind_predictors <= 0 || n_sites <= 0 || n_site_predictors <= 0)
    return invalid("hiermc_regression_coefficients: bad shape");
  return guarded([&] {
    const std::size_t I = n_ind_predictors, S = n_sites, J = n_site_predictors;
    const Matrix beta = models::regression_coefficients(
        to_matrix(gamma, I, J), to_matrix(z, S, J),
        std::span<const double>(theta, I), to_matrix(l_omega, I, I),
        to_matrix(u, I, S));
    std::memcpy(beta_out, beta.data(), I * S * sizeof(double));
    return HIERMC_OK;
  });
}

hiermc_rc hiermc_config_create(hiermc_config** out) {
  if (!out) return invalid("hiermc_config_create: null argument");
  *out = new hiermc_config{};
  return HIERMC_OK;
}

void hiermc_config_free(hiermc_config* config) { delete config; }

#define HIERMC_CONFIG_SETTER(body)                              \
  if (!config) return invalid("null config");                   \
  return guarded([&] {                                          \
    sampler::SamplerConfig c = config->config;                  \
    body;                                                       \
    c.validate();                                               \
    config->config = c;                                         \
    return HIERMC_OK;                                           \
  });

hiermc_rc hiermc_config_set_chains(hiermc_config* config, int32_t chains) {
  HIERMC_CONFIG_SETTER(c.chains = chains)
}
hiermc_rc hiermc_config_set_iterations(hiermc_config* config, int32_t warmup,
                                       int32_t total) {
  HIERMC_CONFIG_SETTER((c.warmup = warmup, c.iterations = total))
}
hiermc_rc hiermc_config_set_seed(hiermc_config* config, uint64_t seed) {
  HIERMC_CONFIG_SETTER(c.seed = seed)
}
hiermc_rc hiermc_config_set_target_accept(hiermc_config* config, double delta) {
  HIERMC_CONFIG_SETTER(c.target_accept = delta)
}
hiermc_rc hiermc_config_set_max_leapfrog(hiermc_config* config, int32_t steps) {
  HIERMC_CONFIG_SETTER(c.max_leapfrog = steps)
}
hiermc_rc hiermc_config_set_divergence_threshold(hiermc_config* config, double value) {
  HIERMC_CONFIG_SETTER(c.divergence_threshold = value)
}
hiermc_rc hiermc_config_set_metric_adaptation(hiermc_config* config, int32_t enabled) {
  HIERMC_CONFIG_SETTER(c.adapt_metric = enabled != 0)
}
hiermc_rc hiermc_config_set_stepsize_jitter(hiermc_config* config, double jitter) {
  HIERMC_CONFIG_SETTER(c.stepsize_jitter = jitter)
}

#undef HIERMC_CONFIG_SETTER

hiermc_rc hiermc_fit_pooling_model(const hiermc_sites* sites,
                                   const hiermc_config* config, double tau_prior_sd,
                                   double sigma_prior_scale, hiermc_fit** out) {
  if (!sites || !config || !out)
    return invalid("hiermc_fit_pooling_model: null argument");
  return guarded([&] {
    models::RandomEffectsConfig prior;
    if (tau_prior_sd > 0.0) prior.tau_prior_sd = tau_prior_sd;
    if (sigma_prior_scale > 0.0) prior.sigma_prior_scale = sigma_prior_scale;
    models::RandomEffectsModel model(sites->sites, prior);
    *out = make_fit(sampler::run_hmc(model, config->config));
    return HIERMC_OK;
  });
}

hiermc_rc hiermc_regression_priors_default(hiermc_regression_priors* out) {
  if (!out) return invalid("hiermc_regression_priors_default: null argument");
  const models::HierRegressionConfig d;
  *out = {d.lkj_eta, d.gamma_prior_sd, d.theta_cauchy_scale, d.sigma_upper};
  return HIERMC_OK;
}

hiermc_rc hiermc_fit_regression_model(const hiermc_data* data,
                                      const hiermc_config* config,
                                      const hiermc_regression_priors* priors,
                                      hiermc_fit** out) {
  if (!data || !config || !out)
    return invalid("hiermc_fit_regression_model: null argument");
  return guarded([&] {
    models::HierRegressionConfig cfg;
    if (priors)
      cfg = {priors->lkj_eta, priors->gamma_prior_sd, priors->theta_cauchy_scale,
             priors->sigma_upper};
    models::HierRegressionModel model(data->data, cfg);
    *out = make_fit(sampler::run_hmc(model, config->config));
    return HIERMC_OK;
  });
}

void hiermc_fit_free(hiermc_fit* fit) { delete fit; }

int32_t hiermc_fit_num_values(const hiermc_fit* fit) {
  return fit ? static_cast<int32_t>(fit->draws.num_values()) : 0;
}

const char* hiermc_fit_value_name(const hiermc_fit* fit, int32_t index) {
  if (!fit || index < 0 || index >= static_cast<int32_t>(fit->draws.num_values()))
    return nullptr;
  return fit->draws.value_names[index].c_str();
}

int32_t hiermc_fit_value_index(const hiermc_fit* fit, const char* name) {
  if (!fit || !name) return -1;
  for (std::size_t i = 0; i < fit->draws.num_values(); ++i)
    if (fit->draws.value_names[i] == name) return static_cast<int32_t>(i);
  return -1;
}

int32_t hiermc_fit_num_chains(const hiermc_fit* fit) {
  return fit ? static_cast<int32_t>(fit->draws.chains.size()) : 0;
}

int32_t hiermc_fit_draws_per_chain(const hiermc_fit* fit) {
  return fit ? static_cast<int32_t>(fit->draws.draws_per_chain()) : 0;
}

hiermc_rc hiermc_fit_extract(const hiermc_fit* fit, int32_t value_index, double* out) {
  if (!fit || !out) return invalid("hiermc_fit_extract: null argument");
  if (value_index < 0 || value_index >= static_cast<int32_t>(fit->draws.num_values()))
    return invalid("hiermc_fit_extract: value index out of range");
  return guarded([&] {
    const std::vector<double> pooled = fit->draws.pooled(value_index);
    std::memcpy(out, pooled.data(), pooled.size() * sizeof(double));
    return HIERMC_OK;
  });
}

hiermc_rc hiermc_fit_summary(const hiermc_fit* fit, int32_t value_index,
                             hiermc_summary* out) {
  if (!fit || !out) return invalid("hiermc_fit_summary: null argument");
  if (value_index < 0 || value_index >= static_cast<int32_t>(fit->summaries.size()))
    return invalid("hiermc_fit_summary: value index out of range");
  const diagnostics::ParamSummary& s = fit->summaries[value_index];
  *out = {s.mean, s.sd,   s.q025, s.q25,
          s.q50,  s.q75,  s.q975, s.rhat,
          s.ess,  s.rhat_degenerate ? 1 : 0, s.ess_degenerate ? 1 : 0};
  return HIERMC_OK;
}

hiermc_rc hiermc_fit_max_rhat(const hiermc_fit* fit, double* out) {
  if (!fit || !out) return invalid("hiermc_fit_max_rhat: null argument");
  *out = diagnostics::max_rhat(fit->summaries);
  return HIERMC_OK;
}

hiermc_rc hiermc_fit_divergences(const hiermc_fit* fit, int32_t* out) {
  if (!fit || !out) return invalid("hiermc_fit_divergences: null argument");
  for (std::size_t c = 0; c < fit->draws.chains.size(); ++c)
    out[c] = fit->draws.chains[c].num_divergent();
  return HIERMC_OK;
}

hiermc_rc hiermc_fit_warmup_divergences(const hiermc_fit* fit, int32_t* out) {
  if (!fit || !out) return invalid("hiermc_fit_warmup_divergences: null argument");
  for (std::size_t c = 0; c < fit->draws.chains.size(); ++c)
    out[c] = fit->draws.chains[c].warmup_divergences;
  return HIERMC_OK;
}

hiermc_rc hiermc_fit_step_sizes(const hiermc_fit* fit, double* out) {
  if (!fit || !out) return invalid("hiermc_fit_step_sizes: null argument");
  for (std::size_t c = 0; c < fit->draws.chains.size(); ++c)
    out[c] = fit->draws.chains[c].step_size;
  return HIERMC_OK;
}

hiermc_rc hiermc_fit_accept_rates(const hiermc_fit* fit, double* out) {
  if (!fit || !out) return invalid("hiermc_fit_accept_rates: null argument");
  for (std::size_t c = 0; c < fit->draws.chains.size(); ++c)
    out[c] = fit->draws.chains[c].accept_rate();
  return HIERMC_OK;
}

hiermc_rc hiermc_pooling(const hiermc_fit* fit, const hiermc_sites* sites,
                         double* omega_out, double* sigma_tilde_out,
                         double* omega_bar_out) {
  if (!fit || !sites || !omega_out || !sigma_tilde_out || !omega_bar_out)
    return invalid("hiermc_pooling: null argument");
  return guarded([&] {
    const diagnostics::PoolingReport rep =
        diagnostics::pooling_report(fit->draws, sites->sites);
    for (std::size_t i = 0; i < rep.omega.size(); ++i) omega_out[i] = rep.omega[i];
    *sigma_tilde_out = rep.sigma_tilde;
    *omega_bar_out = rep.omega_bar;
    return HIERMC_OK;
  });
}

hiermc_rc hiermc_sensitivity(const hiermc_sites* sites, const hiermc_config* config,
                             double tau_prior_sd, double sigma_prior_scale,
                             const hiermc_scenario* scenarios, int32_t n_scenarios,
                             double* sigma_tilde_out, double* omega_bar_out,
                             int32_t* ok_out) {
  if (!sites || !config || !scenarios || !sigma_tilde_out || !omega_bar_out || !ok_out)
    return invalid("hiermc_sensitivity: null argument");
  if (n_scenarios <= 0) return invalid("hiermc_sensitivity: no scenarios");
  return guarded([&] {
    models::RandomEffectsConfig prior;
    if (tau_prior_sd > 0.0) prior.tau_prior_sd = tau_prior_sd;
    if (sigma_prior_scale > 0.0) prior.sigma_prior_scale = sigma_prior_scale;
    std::vector<diagnostics::Scenario> rows(n_scenarios);
    for (int32_t i = 0; i < n_scenarios; ++i) {
      rows[i].label = scenarios[i].label ? scenarios[i].label : "";
      rows[i].tau_factor = scenarios[i].tau_factor;
      rows[i].sigma_factor = scenarios[i].sigma_factor;
      if (scenarios[i].equalize_site)
        rows[i].equalize_site = scenarios[i].equalize_site;
    }
    const std::vector<diagnostics::ScenarioOutcome> outcomes =
        diagnostics::sensitivity_harness(sites->sites, rows, config->config, prior);
    for (int32_t i = 0; i < n_scenarios; ++i) {
      sigma_tilde_out[i] = outcomes[i].sigma_tilde;
      omega_bar_out[i] = outcomes[i].omega_bar;
      ok_out[i] = outcomes[i].ok ? 1 : 0;
    }
    return HIERMC_OK;
  });
}

}  // extern "C"
