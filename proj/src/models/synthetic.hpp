#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/matrix.hpp"
#include "models/hier_regression.hpp"

namespace hiermc::models {

// Generating truth for synthetic regression data. Shapes: gamma I x J, theta I,
// l_omega I x I (lower Cholesky of a correlation matrix), u I x S, sigma S, z S x J.
// I = 2 gives X = (1, treatment); I = 3 adds a standard-normal baseline column.
struct SyntheticTruth {
  Matrix gamma;
  std::vector<double> theta;
  Matrix l_omega;
  Matrix u;
  std::vector<double> sigma;
  Matrix z;
};

struct SyntheticResult {
  std::vector<HouseholdRecord> records;
  Matrix beta;  // implied I x S coefficients
};

// Treatment is Bernoulli(1/2) per household; outcomes are X.beta_s + sigma_s * eps.
// Draws are keyed on (seed, site, household, role), so a given household's data is
// independent of generation order.
SyntheticResult generate_households(const SyntheticTruth& truth,
                                    std::span<const int> households_per_site,
                                    std::uint64_t seed);

}  // namespace hiermc::models
