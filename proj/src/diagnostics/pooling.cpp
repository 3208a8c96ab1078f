#include "diagnostics/pooling.hpp"

#include "core/errors.hpp"

namespace hiermc::diagnostics {

double pooling_factor(double sigma_hat, double sigma_tilde) {
  if (!(sigma_hat > 0.0)) throw DomainError("pooling_factor: sigma_hat must be positive");
  if (!(sigma_tilde >= 0.0))
    throw DomainError("pooling_factor: sigma_tilde must be non-negative");
  const double se2 = sigma_hat * sigma_hat;
  return se2 / (sigma_tilde * sigma_tilde + se2);
}

PoolingReport pooling_report(const sampler::ChainDraws& fit,
                             std::span<const models::SiteSummary> sites) {
  models::validate_sites(sites);
  const std::vector<double> sigma_draws = fit.pooled(fit.index_of("sigma"));
  if (sigma_draws.empty()) throw DataError("pooling_report: fit has no draws");
  double st = 0.0;
  for (double v : sigma_draws) st += v;
  st /= static_cast<double>(sigma_draws.size());

  PoolingReport rep;
  rep.sigma_tilde = st;
  rep.omega.reserve(sites.size());
  for (const auto& s : sites) rep.omega.push_back(pooling_factor(s.sigma_hat, st));
  double ob = 0.0;
  for (double w : rep.omega) ob += w;
  rep.omega_bar = ob / static_cast<double>(rep.omega.size());
  return rep;
}

}  // namespace hiermc::diagnostics
