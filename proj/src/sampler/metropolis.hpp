#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sampler/rng.hpp"

namespace hiermc::sampler {

// Log target density; may return -inf to reject a region outright.
using LogDensityFn = std::function<double(std::span<const double> q)>;

struct RwStepResult {
  bool accepted = false;
  double log_ratio = 0.0;  // log target(proposal) - log target(current)
};

// Symmetric random-walk proposal q' = q + proposal_sd * z with z ~ N(0, I) keyed on
// (step, coordinate label); accepted with probability min(1, exp(log_ratio)).
// A proposal at least as good as the current point is always accepted.
RwStepResult rw_metropolis_step(std::vector<double>& q, double& logp,
                                const LogDensityFn& target, const ChainRandom& rng,
                                std::uint64_t step, double proposal_sd);

}  // namespace hiermc::sampler
