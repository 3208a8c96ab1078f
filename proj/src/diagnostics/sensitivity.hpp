#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "models/random_effects.hpp"
#include "models/site_summary.hpp"
#include "sampler/config.hpp"

namespace hiermc::diagnostics {

// A perturbation of the site inputs: optionally overwrite every tau_hat with one
// site's value, then scale tau_hat and sigma_hat.
struct Scenario {
  std::string label;
  double tau_factor = 1.0;
  double sigma_factor = 1.0;
  std::optional<std::string> equalize_site{};
};

std::vector<models::SiteSummary> apply_scenario(
    std::span<const models::SiteSummary> base, const Scenario& scenario);

// Baseline plus tau x10 / x0.1, sigma x10 / x0.1, and tau_hat equalized to the
// first site's value.
std::vector<Scenario> default_scenarios(std::span<const models::SiteSummary> base);

struct ScenarioOutcome {
  std::string label;
  bool ok = false;
  std::string error;
  double sigma_tilde = 0.0;
  double omega_bar = 0.0;
};

// Refits the random-effects model per scenario and reports the plug-in pooling
// numbers. A failing row carries its error message; the remaining rows still run.
std::vector<ScenarioOutcome> sensitivity_harness(
    std::span<const models::SiteSummary> base, std::span<const Scenario> scenarios,
    const sampler::SamplerConfig& config, const models::RandomEffectsConfig& prior);

}  // namespace hiermc::diagnostics
