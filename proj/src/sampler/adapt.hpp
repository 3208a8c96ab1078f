#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "models/model.hpp"
#include "sampler/config.hpp"
#include "sampler/hmc.hpp"
#include "sampler/rng.hpp"

namespace hiermc::sampler {

// Nesterov dual averaging on ln(eps), driven toward a target acceptance statistic.
struct DualAveraging {
  double target = 0.8;
  double gamma = 0.05, t0 = 10.0, kappa = 0.75;
  double mu = 0.0, log_eps = 0.0, log_eps_bar = 0.0, h_bar = 0.0;
  int count = 0;

  void restart(double eps0);
  void observe(double accept_prob);
  double eps() const;           // current exploration value
  double eps_averaged() const;  // iterate average, the adapted result
};

// Welford accumulator with the shrinkage used for metric estimation:
// (n/(n+5)) * sample variance + 1e-3 * (5/(n+5)).
struct RunningVariance {
  std::vector<double> mean, m2;
  long long n = 0;

  void reset(std::size_t dim);
  void add(std::span<const double> q);
  std::vector<double> regularized() const;
};

// Doubles eps up/down until a single-step acceptance crosses 1/2, reusing one
// momentum draw. `state` must carry a valid potential/gradient; it is not moved.
double find_reasonable_step_size(const PhaseState& state, const PotentialFn& potential,
                                 const ChainRandom& rng, std::uint64_t key_step,
                                 std::span<const double> mass, double eps0 = 1.0);

struct WarmupResult {
  double step_size = 0.0;
  std::vector<double> metric;  // per-coordinate variance estimates (inverse masses)
  int divergent = 0;           // warmup iterations flagged divergent
  int nonfinite = 0;           // subset of the above that broke down numerically
};

// Windowed warmup: step-size buffer, expanding variance-estimation windows (metric
// and step size re-initialized at each window close), terminal step-size buffer.
// Iterations are keyed 0..warmup-1 on the chain stream; `state` is evolved in
// place. Throws SamplingError when more than half the warmup iterations produce
// non-finite trajectories.
WarmupResult adapt_warmup_chain(PhaseState& state, const PotentialFn& potential,
                                const ChainRandom& rng, const SamplerConfig& config);

// Standalone form: initializes from `position` (must be finite for the model) and
// returns the adapted (eps, metric); `position` is updated to the warmup endpoint.
WarmupResult adapt_warmup(const models::Model& model, const SamplerConfig& config,
                          const ChainRandom& rng, std::vector<double>& position);

// Shared bridge: potential oracle over a model's log density.
PotentialFn model_potential(const models::Model& model);

}  // namespace hiermc::sampler
