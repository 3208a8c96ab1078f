#include "models/random_effects.hpp"

#include <cmath>

namespace hiermc::models {

namespace mc = hiermc::mathcore;

RandomEffectsModel::RandomEffectsModel(std::vector<SiteSummary> sites,
                                       RandomEffectsConfig cfg)
    : sites_(std::move(sites)), cfg_(cfg) {
  validate_sites(sites_);
  if (!(cfg_.tau_prior_sd > 0.0))
    throw DomainError("RandomEffectsModel: tau_prior_sd must be positive");
  if (!(cfg_.sigma_prior_scale > 0.0))
    throw DomainError("RandomEffectsModel: sigma_prior_scale must be positive");
  if (cfg_.fixed_sigma && !(*cfg_.fixed_sigma > 0.0))
    throw DomainError("RandomEffectsModel: fixed_sigma must be positive");
}

void RandomEffectsModel::check_input(std::span<const double> z) const {
  if (z.size() != dim()) throw ShapeError("log_density: wrong parameter count");
  for (double zi : z)
    if (!std::isfinite(zi)) throw EvaluationError("log_density: non-finite input");
}

double RandomEffectsModel::log_density(std::span<const double> z,
                                       std::span<double> grad) const {
  check_input(z);
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != dim())
    throw ShapeError("log_density: gradient buffer has wrong length");

  const std::size_t S = sites_.size();
  const double tau = z[0];
  const double log_sigma = fixed() ? 0.0 : z[1];
  const double sigma = fixed() ? *cfg_.fixed_sigma : std::exp(log_sigma);
  const std::size_t eta_off = fixed() ? 1 : 2;

  double lp = 0.0;
  double g_tau = 0.0, g_log_sigma = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    const double se = sites_[s].sigma_hat;
    const double eta = z[eta_off + s];
    const double r = sites_[s].tau_hat - (tau + sigma * eta);
    const double w = r / (se * se);
    lp += -0.5 * mc::kLogTwoPi - std::log(se) - 0.5 * r * w;
    lp += -0.5 * mc::kLogTwoPi - 0.5 * eta * eta;
    if (want_grad) {
      g_tau += w;
      g_log_sigma += w * sigma * eta;
      grad[eta_off + s] = w * sigma - eta;
    }
  }

  const double tsd = cfg_.tau_prior_sd;
  lp += -0.5 * mc::kLogTwoPi - std::log(tsd) - 0.5 * tau * tau / (tsd * tsd);
  if (want_grad) grad[0] = g_tau - tau / (tsd * tsd);

  if (!fixed()) {
    const double scale = cfg_.sigma_prior_scale;
    lp += mc::kLogTwoOverPi - std::log(scale) -
          std::log1p((sigma / scale) * (sigma / scale));
    lp += log_sigma;  // Jacobian of sigma = exp(z)
    if (want_grad)
      grad[1] = g_log_sigma -
                2.0 * sigma * sigma / (scale * scale + sigma * sigma) + 1.0;
  }
  return lp;
}

std::vector<double> RandomEffectsModel::constrain(std::span<const double> z) const {
  RandomEffectsParams p = constrain_params(z);
  std::vector<double> out;
  out.reserve(2 + 2 * p.eta.size());
  out.push_back(p.tau);
  out.push_back(p.sigma);
  out.insert(out.end(), p.eta.begin(), p.eta.end());
  out.insert(out.end(), p.tau_site.begin(), p.tau_site.end());
  return out;
}

RandomEffectsParams RandomEffectsModel::constrain_params(std::span<const double> z) const {
  if (z.size() != dim()) throw ShapeError("constrain: wrong parameter count");
  const std::size_t S = sites_.size();
  RandomEffectsParams p;
  p.tau = z[0];
  p.sigma = fixed() ? *cfg_.fixed_sigma : std::exp(z[1]);
  const std::size_t eta_off = fixed() ? 1 : 2;
  p.eta.assign(z.begin() + eta_off, z.begin() + eta_off + S);
  p.tau_site.resize(S);
  for (std::size_t s = 0; s < S; ++s) p.tau_site[s] = p.tau + p.sigma * p.eta[s];
  return p;
}

std::vector<std::string> RandomEffectsModel::value_names() const {
  std::vector<std::string> names;
  names.reserve(2 + 2 * sites_.size());
  names.emplace_back("tau");
  names.emplace_back("sigma");
  for (const auto& s : sites_) names.push_back("eta[" + s.name + "]");
  for (const auto& s : sites_) names.push_back("tau_s[" + s.name + "]");
  return names;
}

std::vector<std::string> RandomEffectsModel::coordinate_labels() const {
  std::vector<std::string> labels;
  labels.reserve(dim());
  labels.emplace_back("tau");
  if (!fixed()) labels.emplace_back("log_sigma");
  for (const auto& s : sites_) labels.push_back("eta[" + s.name + "]");
  return labels;
}

}  // namespace hiermc::models
