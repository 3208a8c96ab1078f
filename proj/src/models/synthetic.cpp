#include "models/synthetic.hpp"

#include "core/errors.hpp"
#include "sampler/rng.hpp"

namespace hiermc::models {

using hiermc::sampler::hash_combine;
using hiermc::sampler::KeyedStream;
using hiermc::sampler::splitmix64;

SyntheticResult generate_households(const SyntheticTruth& truth,
                                    std::span<const int> households_per_site,
                                    std::uint64_t seed) {
  const std::size_t I = truth.gamma.rows(), S = truth.u.cols();
  if (I != 2 && I != 3)
    throw ShapeError("generate_households: gamma rows must be 2 or 3");
  if (households_per_site.size() != S)
    throw ShapeError("generate_households: sample sizes must match u columns");
  if (truth.sigma.size() != S)
    throw ShapeError("generate_households: sigma length must match site count");
  for (double s : truth.sigma)
    if (!(s > 0.0)) throw DomainError("generate_households: sigma must be positive");
  for (int n : households_per_site)
    if (n <= 0) throw DataError("generate_households: sample sizes must be positive");

  SyntheticResult out;
  out.beta = regression_coefficients(truth.gamma, truth.z, truth.theta, truth.l_omega,
                                     truth.u);

  const std::uint64_t base = splitmix64(seed);
  for (std::size_t s = 0; s < S; ++s) {
    const std::uint64_t site_key = hash_combine(base, s + 1);
    for (int i = 0; i < households_per_site[s]; ++i) {
      const std::uint64_t rec_key =
          hash_combine(site_key, static_cast<std::uint64_t>(i) + 1);
      HouseholdRecord rec;
      rec.site_index = static_cast<int>(s) + 1;
      rec.treatment = KeyedStream{hash_combine(rec_key, 1)}.uniform() < 0.5 ? 0 : 1;
      if (I == 3) rec.baseline = KeyedStream{hash_combine(rec_key, 2)}.normal();
      double mu = out.beta(0, s) + out.beta(1, s) * rec.treatment;
      if (I == 3) mu += out.beta(2, s) * *rec.baseline;
      rec.outcome = mu + truth.sigma[s] * KeyedStream{hash_combine(rec_key, 3)}.normal();
      out.records.push_back(rec);
    }
  }
  return out;
}

}  // namespace hiermc::models
