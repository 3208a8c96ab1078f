#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace hiermc::models {

// One site's estimated effect and its standard error.
struct SiteSummary {
  std::string name;
  double tau_hat = 0.0;
  double sigma_hat = 0.0;
};

// Throws DataError on empty input, duplicate names, or non-positive sigma_hat.
inline void validate_sites(std::span<const SiteSummary> sites) {
  if (sites.empty()) throw DataError("site list is empty");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (!(sites[i].sigma_hat > 0.0))
      throw DataError("site '" + sites[i].name + "': sigma_hat must be positive");
    for (std::size_t j = i + 1; j < sites.size(); ++j)
      if (sites[i].name == sites[j].name)
        throw DataError("duplicate site name '" + sites[i].name + "'");
  }
}

}  // namespace hiermc::models
