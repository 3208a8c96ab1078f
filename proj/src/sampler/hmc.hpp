#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sampler/rng.hpp"

namespace hiermc::sampler {

// Potential oracle: fills U(q) = -log target and its gradient; returns false when
// the input or any output is non-finite (callers treat that as a broken trajectory,
// never as an error).
using PotentialFn =
    std::function<bool(std::span<const double> q, double& u, std::span<double> grad_u)>;

struct PhaseState {
  std::vector<double> position;
  std::vector<double> momentum;
  double potential = 0.0;
  std::vector<double> grad_potential;  // dU/dq at `position`
};

double kinetic_energy(std::span<const double> p, std::span<const double> mass);

// Stormer-Verlet: half momentum kick, then `steps` position drifts with full kicks
// between and a half kick at the end. q_d += eps * p_d / mass_d. `state` must carry
// a valid potential/gradient on entry; on a non-finite evaluation returns false with
// the state mid-trajectory. steps == 0 is a no-op.
bool leapfrog(PhaseState& state, const PotentialFn& potential, double eps, int steps,
              std::span<const double> mass);

struct HmcStepResult {
  bool accepted = false;
  bool divergent = false;
  bool nonfinite = false;     // trajectory or energy broke down numerically
  double energy_error = 0.0;  // H(proposal) - H(current); +inf when nonfinite
  double accept_prob = 0.0;   // min(1, exp(-energy_error)); 0 when nonfinite
  int steps = 0;
};

// One Hamiltonian proposal from state. Momentum ~ N(0, mass) keyed on (step,
// coordinate label); trajectory length ~ U{1..max_steps} unless forced_steps >= 0.
// Divergent proposals (energy_error > divergence_threshold or non-finite) are
// always rejected; on rejection the state is left untouched, so the previous
// position is retained.
HmcStepResult hmc_step(PhaseState& state, const PotentialFn& potential,
                       const ChainRandom& rng, std::uint64_t step, double eps,
                       int max_steps, std::span<const double> mass,
                       double divergence_threshold, int forced_steps = -1);

}  // namespace hiermc::sampler
