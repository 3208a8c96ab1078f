#pragma once

#include <cstdint>

#include "core/errors.hpp"

namespace hiermc::sampler {

struct SamplerConfig {
  int chains = 4;
  int warmup = 1000;
  int iterations = 2000;  // total per chain, warmup included
  std::uint64_t seed = 1;
  double target_accept = 0.99;
  int max_leapfrog = 32;
  double divergence_threshold = 1000.0;
  bool adapt_metric = true;
  double stepsize_jitter = 0.0;

  void validate() const {
    if (chains < 1) throw DomainError("SamplerConfig: chains must be >= 1");
    if (warmup < 0) throw DomainError("SamplerConfig: warmup must be >= 0");
    if (iterations <= warmup)
      throw DomainError("SamplerConfig: iterations must exceed warmup");
    if (!(target_accept > 0.0 && target_accept < 1.0))
      throw DomainError("SamplerConfig: target_accept must lie in (0,1)");
    if (max_leapfrog < 1) throw DomainError("SamplerConfig: max_leapfrog must be >= 1");
    if (!(divergence_threshold > 0.0))
      throw DomainError("SamplerConfig: divergence_threshold must be positive");
    if (stepsize_jitter < 0.0 || stepsize_jitter >= 1.0)
      throw DomainError("SamplerConfig: stepsize_jitter must lie in [0,1)");
  }
};

}  // namespace hiermc::sampler
