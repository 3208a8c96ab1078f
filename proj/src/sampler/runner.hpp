#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "models/model.hpp"
#include "sampler/config.hpp"

namespace hiermc::sampler {

struct ChainResult {
  // Retained (post-warmup) draws of the constrained values, row-major
  // [iteration][value]; one flag/error entry per retained iteration.
  std::vector<double> draws;
  std::vector<std::uint8_t> accepted;
  std::vector<std::uint8_t> divergent;
  std::vector<double> energy_error;
  double step_size = 0.0;
  std::vector<double> metric;  // adapted variance estimates (inverse masses)
  int warmup_divergences = 0;

  int num_divergent() const;
  double accept_rate() const;
};

struct ChainDraws {
  std::vector<std::string> value_names;
  std::vector<ChainResult> chains;

  std::size_t num_values() const { return value_names.size(); }
  std::size_t draws_per_chain() const {
    return chains.empty() || value_names.empty()
               ? 0
               : chains.front().draws.size() / value_names.size();
  }
  // Throws DataError when the name is absent.
  std::size_t index_of(std::string_view name) const;
  // All chains concatenated in chain order.
  std::vector<double> pooled(std::size_t value_index) const;
  std::vector<std::vector<double>> per_chain(std::size_t value_index) const;
  int total_divergent() const;
};

// Multi-chain NUTS-free HMC: jittered-length trajectories, dual-averaged step size,
// windowed diagonal metric. Chains run on separate threads; results are keyed by
// (seed, chain index, iteration, coordinate label) and therefore bit-identical for
// identical (model, config) regardless of scheduling.
ChainDraws run_hmc(const models::Model& model, const SamplerConfig& config);

// Random-walk Metropolis baseline with a fixed isotropic proposal. The same
// warmup/retention split applies; no adaptation is performed.
ChainDraws run_rw_metropolis(const models::Model& model, const SamplerConfig& config,
                             double proposal_sd);

}  // namespace hiermc::sampler
