#include "sampler/hmc.hpp"

#include <cmath>
#include <limits>

namespace hiermc::sampler {

double kinetic_energy(std::span<const double> p, std::span<const double> mass) {
  double k = 0.0;
  for (std::size_t d = 0; d < p.size(); ++d) k += p[d] * p[d] / (2.0 * mass[d]);
  return k;
}

bool leapfrog(PhaseState& state, const PotentialFn& potential, double eps, int steps,
              std::span<const double> mass) {
  if (steps <= 0) return true;
  auto& q = state.position;
  auto& p = state.momentum;
  auto& g = state.grad_potential;
  const std::size_t n = q.size();

  for (std::size_t d = 0; d < n; ++d) p[d] -= 0.5 * eps * g[d];
  for (int i = 0; i < steps; ++i) {
    for (std::size_t d = 0; d < n; ++d) q[d] += eps * p[d] / mass[d];
    if (!potential(q, state.potential, g)) return false;
    const double kick = (i + 1 == steps) ? 0.5 * eps : eps;
    for (std::size_t d = 0; d < n; ++d) {
      p[d] -= kick * g[d];
      if (!std::isfinite(p[d])) return false;
    }
  }
  return true;
}

HmcStepResult hmc_step(PhaseState& state, const PotentialFn& potential,
                       const ChainRandom& rng, std::uint64_t step, double eps,
                       int max_steps, std::span<const double> mass,
                       double divergence_threshold, int forced_steps) {
  HmcStepResult res;
  res.steps = forced_steps >= 0
                  ? forced_steps
                  : rng.at(ChainRandom::kLength, step).uniform_int(1, max_steps);

  rng.fill_momentum(step, mass, state.momentum);
  const double e0 = state.potential + kinetic_energy(state.momentum, mass);

  PhaseState trial = state;
  const bool ok = leapfrog(trial, potential, eps, res.steps, mass);
  double dh = std::numeric_limits<double>::infinity();
  if (ok) dh = trial.potential + kinetic_energy(trial.momentum, mass) - e0;

  if (!ok || !std::isfinite(dh)) {
    res.nonfinite = true;
    res.divergent = true;
    res.energy_error = std::numeric_limits<double>::infinity();
    res.accept_prob = 0.0;
    return res;
  }
  res.energy_error = dh;
  res.accept_prob = dh < 0.0 ? 1.0 : std::exp(-dh);
  res.divergent = dh > divergence_threshold;
  if (res.divergent) return res;

  if (rng.at(ChainRandom::kAccept, step).uniform() < res.accept_prob) {
    res.accepted = true;
    state.position = std::move(trial.position);
    state.potential = trial.potential;
    state.grad_potential = std::move(trial.grad_potential);
  }
  return res;
}

}  // namespace hiermc::sampler
