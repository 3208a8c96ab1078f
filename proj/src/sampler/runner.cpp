#include "sampler/runner.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "core/errors.hpp"
#include "sampler/adapt.hpp"
#include "sampler/hmc.hpp"
#include "sampler/metropolis.hpp"
#include "sampler/rng.hpp"

namespace hiermc::sampler {

int ChainResult::num_divergent() const {
  int n = 0;
  for (auto d : divergent) n += d;
  return n;
}

double ChainResult::accept_rate() const {
  if (accepted.empty()) return 0.0;
  double n = 0;
  for (auto a : accepted) n += a;
  return n / static_cast<double>(accepted.size());
}

std::size_t ChainDraws::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < value_names.size(); ++i)
    if (value_names[i] == name) return i;
  throw DataError("no sampled value named '" + std::string(name) + "'");
}

std::vector<double> ChainDraws::pooled(std::size_t value_index) const {
  std::vector<double> out;
  const std::size_t nv = num_values();
  out.reserve(draws_per_chain() * chains.size());
  for (const auto& c : chains)
    for (std::size_t i = value_index; i < c.draws.size(); i += nv)
      out.push_back(c.draws[i]);
  return out;
}

std::vector<std::vector<double>> ChainDraws::per_chain(std::size_t value_index) const {
  std::vector<std::vector<double>> out;
  const std::size_t nv = num_values();
  for (const auto& c : chains) {
    std::vector<double> one;
    one.reserve(c.draws.size() / nv);
    for (std::size_t i = value_index; i < c.draws.size(); i += nv)
      one.push_back(c.draws[i]);
    out.push_back(std::move(one));
  }
  return out;
}

int ChainDraws::total_divergent() const {
  int n = 0;
  for (const auto& c : chains) n += c.num_divergent();
  return n;
}

namespace {

// Find a finite starting point from label-keyed U[-2,2] draws.
void initialize_chain(const models::Model& model, const PotentialFn& potential,
                      const ChainRandom& rng, int chain_index, PhaseState& state) {
  const std::size_t dim = model.dim();
  state.position.assign(dim, 0.0);
  state.momentum.assign(dim, 0.0);
  state.grad_potential.assign(dim, 0.0);
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    rng.fill_initial_position(attempt, state.position);
    if (potential(state.position, state.potential, state.grad_potential)) return;
  }
  throw SamplingError("no finite starting point found in 100 attempts", chain_index);
}

template <class ChainFn>
std::vector<ChainResult> run_chains(int chains, ChainFn&& one_chain) {
  std::vector<ChainResult> results(chains);
  std::vector<std::exception_ptr> errors(chains);
  std::vector<std::thread> threads;
  threads.reserve(chains);
  for (int c = 0; c < chains; ++c)
    threads.emplace_back([&, c] {
      try {
        results[c] = one_chain(c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (int c = 0; c < chains; ++c)
    if (errors[c]) std::rethrow_exception(errors[c]);
  return results;
}

}  // namespace

ChainDraws run_hmc(const models::Model& model, const SamplerConfig& config) {
  config.validate();
  const std::vector<std::string> labels = model.coordinate_labels();
  const std::size_t dim = model.dim();
  if (labels.size() != dim)
    throw ShapeError("model reports " + std::to_string(labels.size()) +
                     " coordinate labels for dimension " + std::to_string(dim));
  const PotentialFn potential = model_potential(model);
  const int retained = config.iterations - config.warmup;

  ChainDraws out;
  out.value_names = model.value_names();
  const std::size_t nv = out.value_names.size();

  out.chains = run_chains(config.chains, [&](int c) {
    ChainRandom rng(config.seed, c, labels);
    PhaseState state;
    initialize_chain(model, potential, rng, c, state);

    WarmupResult warm;
    try {
      warm = adapt_warmup_chain(state, potential, rng, config);
    } catch (const SamplingError& e) {
      throw SamplingError(e.what(), c);
    }
    std::vector<double> mass(dim);
    for (std::size_t d = 0; d < dim; ++d) mass[d] = 1.0 / warm.metric[d];

    ChainResult res;
    res.step_size = warm.step_size;
    res.metric = warm.metric;
    res.warmup_divergences = warm.divergent;
    res.draws.reserve(static_cast<std::size_t>(retained) * nv);
    res.accepted.reserve(retained);
    res.divergent.reserve(retained);
    res.energy_error.reserve(retained);

    for (int t = config.warmup; t < config.iterations; ++t) {
      double eps = warm.step_size;
      if (config.stepsize_jitter > 0.0)
        eps *= 1.0 + config.stepsize_jitter *
                         (2.0 * rng.at(ChainRandom::kJitter, t).uniform() - 1.0);
      const HmcStepResult step =
          hmc_step(state, potential, rng, static_cast<std::uint64_t>(t), eps,
                   config.max_leapfrog, mass, config.divergence_threshold);
      const std::vector<double> values = model.constrain(state.position);
      res.draws.insert(res.draws.end(), values.begin(), values.end());
      res.accepted.push_back(step.accepted);
      res.divergent.push_back(step.divergent);
      res.energy_error.push_back(step.energy_error);
    }
    return res;
  });
  return out;
}

ChainDraws run_rw_metropolis(const models::Model& model, const SamplerConfig& config,
                             double proposal_sd) {
  config.validate();
  if (!(proposal_sd > 0.0))
    throw DomainError("run_rw_metropolis: proposal_sd must be positive");
  const std::vector<std::string> labels = model.coordinate_labels();
  const PotentialFn potential = model_potential(model);
  const LogDensityFn target = [&](std::span<const double> q) {
    try {
      const double lp = model.log_density(q, {});
      return std::isfinite(lp) ? lp : -std::numeric_limits<double>::infinity();
    } catch (const EvaluationError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const int retained = config.iterations - config.warmup;

  ChainDraws out;
  out.value_names = model.value_names();
  const std::size_t nv = out.value_names.size();

  out.chains = run_chains(config.chains, [&](int c) {
    ChainRandom rng(config.seed, c, labels);
    PhaseState state;
    initialize_chain(model, potential, rng, c, state);
    std::vector<double> q = state.position;
    double logp = -state.potential;

    ChainResult res;
    res.step_size = proposal_sd;
    res.metric.assign(model.dim(), 1.0);
    res.draws.reserve(static_cast<std::size_t>(retained) * nv);

    for (int t = 0; t < config.iterations; ++t) {
      const RwStepResult step =
          rw_metropolis_step(q, logp, target, rng, static_cast<std::uint64_t>(t),
                             proposal_sd);
      if (t < config.warmup) continue;
      const std::vector<double> values = model.constrain(q);
      res.draws.insert(res.draws.end(), values.begin(), values.end());
      res.accepted.push_back(step.accepted);
      res.divergent.push_back(0);
      res.energy_error.push_back(-step.log_ratio);
    }
    return res;
  });
  return out;
}

}  // namespace hiermc::sampler
