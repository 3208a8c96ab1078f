#pragma once

#include <span>
#include <vector>

#include "models/site_summary.hpp"
#include "sampler/runner.hpp"

namespace hiermc::diagnostics {

// omega_s = sigma_hat_s^2 / (sigma_tilde^2 + sigma_hat_s^2): the weight a site's
// posterior effect places on the shared mean rather than its own estimate.
double pooling_factor(double sigma_hat, double sigma_tilde);

struct PoolingReport {
  double sigma_tilde = 0.0;  // plug-in value: posterior mean of sigma
  std::vector<double> omega;  // aligned with `sites`
  double omega_bar = 0.0;     // arithmetic mean of omega
};

// Requires the fit to carry a value named "sigma"; throws DataError otherwise.
PoolingReport pooling_report(const sampler::ChainDraws& fit,
                             std::span<const models::SiteSummary> sites);

}  // namespace hiermc::diagnostics
