#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "mathcore/densities.hpp"
#include "models/model.hpp"
#include "models/site_summary.hpp"

namespace hiermc::models {

struct RandomEffectsConfig {
  double tau_prior_sd = 2.2360679774997896;  // sqrt(5)
  double sigma_prior_scale = 5.0;
  // When set, the between-site scale is held at this value and dropped from the
  // parameter vector; the posterior is then jointly Gaussian in (tau, eta).
  std::optional<double> fixed_sigma;
};

struct RandomEffectsParams {
  double tau;
  double sigma;
  std::vector<double> eta;
  std::vector<double> tau_site;  // tau + sigma * eta, per site
};

// Partial-pooling model for site-level effect estimates:
//   tau_hat_s ~ N(tau + sigma * eta_s, sigma_hat_s),  eta_s ~ N(0,1)  (non-centered)
//   tau ~ N(0, tau_prior_sd),  sigma ~ half-Cauchy(sigma_prior_scale)
// Unconstrained coordinates: (tau, ln sigma, eta_1..eta_S), or (tau, eta_1..eta_S)
// when sigma is fixed. Reported values: tau, sigma, eta[...], tau_s[...].
class RandomEffectsModel final : public Model {
 public:
  explicit RandomEffectsModel(std::vector<SiteSummary> sites, RandomEffectsConfig cfg = {});

  std::size_t dim() const override { return sites_.size() + (fixed() ? 1 : 2); }
  double log_density(std::span<const double> z, std::span<double> grad) const override;
  std::vector<double> constrain(std::span<const double> z) const override;
  std::vector<std::string> value_names() const override;
  std::vector<std::string> coordinate_labels() const override;

  RandomEffectsParams constrain_params(std::span<const double> z) const;

  std::size_t num_sites() const { return sites_.size(); }
  const std::vector<SiteSummary>& sites() const { return sites_; }
  const RandomEffectsConfig& config() const { return cfg_; }
  bool fixed() const { return cfg_.fixed_sigma.has_value(); }

  // Same posterior kernel on any scalar type; single source for the dual-number
  // cross-check of the hand-written gradient in log_density.
  template <class T>
  T log_density_generic(std::span<const T> z) const {
    namespace mc = hiermc::mathcore;
    using std::exp;
    if (z.size() != dim()) throw ShapeError("log_density: wrong parameter count");
    const std::size_t S = sites_.size();
    T tau = z[0];
    T sigma = fixed() ? T(*cfg_.fixed_sigma) : exp(z[1]);
    std::span<const T> eta = z.subspan(fixed() ? 1 : 2, S);
    T lp(0.0);
    for (std::size_t s = 0; s < S; ++s) {
      lp += mc::normal_lpdf(T(sites_[s].tau_hat), tau + sigma * eta[s],
                            T(sites_[s].sigma_hat));
      lp += mc::normal_lpdf(eta[s], T(0.0), T(1.0));
    }
    lp += mc::normal_lpdf(tau, T(0.0), T(cfg_.tau_prior_sd));
    if (!fixed()) {
      lp += mc::half_cauchy_lpdf(sigma, T(cfg_.sigma_prior_scale));
      lp += z[1];  // Jacobian of sigma = exp(z)
    }
    return lp;
  }

 private:
  void check_input(std::span<const double> z) const;

  std::vector<SiteSummary> sites_;
  RandomEffectsConfig cfg_;
};

}  // namespace hiermc::models
