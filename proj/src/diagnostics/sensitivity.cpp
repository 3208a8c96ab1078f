#include "diagnostics/sensitivity.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "diagnostics/pooling.hpp"
#include "sampler/runner.hpp"

namespace hiermc::diagnostics {

std::vector<models::SiteSummary> apply_scenario(
    std::span<const models::SiteSummary> base, const Scenario& scenario) {
  models::validate_sites(base);
  if (!std::isfinite(scenario.tau_factor))
    throw DomainError("scenario '" + scenario.label + "': bad tau factor");
  if (!(scenario.sigma_factor > 0.0) || !std::isfinite(scenario.sigma_factor))
    throw DomainError("scenario '" + scenario.label + "': sigma factor must be positive");

  std::vector<models::SiteSummary> out(base.begin(), base.end());
  if (scenario.equalize_site) {
    const models::SiteSummary* ref = nullptr;
    for (const auto& s : out)
      if (s.name == *scenario.equalize_site) ref = &s;
    if (!ref)
      throw DataError("scenario '" + scenario.label + "': unknown site '" +
                      *scenario.equalize_site + "'");
    const double tau = ref->tau_hat;
    for (auto& s : out) s.tau_hat = tau;
  }
  for (auto& s : out) {
    s.tau_hat *= scenario.tau_factor;
    s.sigma_hat *= scenario.sigma_factor;
  }
  return out;
}

std::vector<Scenario> default_scenarios(std::span<const models::SiteSummary> base) {
  models::validate_sites(base);
  std::vector<Scenario> out;
  out.push_back({.label = "baseline"});
  out.push_back({.label = "tau*10", .tau_factor = 10.0});
  out.push_back({.label = "tau*0.1", .tau_factor = 0.1});
  out.push_back({.label = "sigma*10", .sigma_factor = 10.0});
  out.push_back({.label = "sigma*0.1", .sigma_factor = 0.1});
  out.push_back({.label = "equalize=" + base.front().name,
                 .equalize_site = base.front().name});
  return out;
}

std::vector<ScenarioOutcome> sensitivity_harness(
    std::span<const models::SiteSummary> base, std::span<const Scenario> scenarios,
    const sampler::SamplerConfig& config, const models::RandomEffectsConfig& prior) {
  std::vector<ScenarioOutcome> out;
  out.reserve(scenarios.size());
  for (const auto& sc : scenarios) {
    ScenarioOutcome row;
    row.label = sc.label;
    row.sigma_tilde = std::numeric_limits<double>::quiet_NaN();
    row.omega_bar = std::numeric_limits<double>::quiet_NaN();
    try {
      const std::vector<models::SiteSummary> sites = apply_scenario(base, sc);
      models::RandomEffectsModel model(sites, prior);
      const sampler::ChainDraws fit = sampler::run_hmc(model, config);
      const PoolingReport rep = pooling_report(fit, sites);
      row.sigma_tilde = rep.sigma_tilde;
      row.omega_bar = rep.omega_bar;
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace hiermc::diagnostics
