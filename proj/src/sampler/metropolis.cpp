#include "sampler/metropolis.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace hiermc::sampler {

RwStepResult rw_metropolis_step(std::vector<double>& q, double& logp,
                                const LogDensityFn& target, const ChainRandom& rng,
                                std::uint64_t step, double proposal_sd) {
  if (!(proposal_sd > 0.0))
    throw DomainError("rw_metropolis_step: proposal_sd must be positive");
  RwStepResult res;
  std::vector<double> prop(q.size());
  rng.fill_proposal_normals(step, prop);
  for (std::size_t d = 0; d < q.size(); ++d) prop[d] = q[d] + proposal_sd * prop[d];

  const double lp_prop = target(prop);
  res.log_ratio = lp_prop - logp;
  if (res.log_ratio >= 0.0 ||
      rng.at(ChainRandom::kAccept, step).uniform() < std::exp(res.log_ratio)) {
    res.accepted = true;
    q = std::move(prop);
    logp = lp_prop;
  }
  return res;
}

}  // namespace hiermc::sampler
