#pragma once

#include <span>
#include <string>
#include <vector>

#include "sampler/runner.hpp"

namespace hiermc::diagnostics {

struct RhatResult {
  double value = 1.0;
  bool degenerate = false;  // zero within-group variance everywhere
};

// Split potential-scale-reduction: each chain is halved (middle element dropped
// when odd) and R-hat = sqrt(var_plus / W) over the 2C half-chains.
RhatResult split_rhat(std::span<const std::vector<double>> chains);

struct EssResult {
  double value = 0.0;
  bool degenerate = false;  // constant sequence; value is the raw draw count
};

// Effective sample size from the initial positive sequence of paired
// autocorrelations (Geyer truncation), capped at 1.5x the raw count.
EssResult effective_sample_size(std::span<const double> x);

// Sum of per-chain estimates.
EssResult effective_sample_size(std::span<const std::vector<double>> chains);

// Type-7 quantile (linear interpolation): h = (n-1)p on the sorted sample.
double quantile(std::vector<double> x, double p);

struct ParamSummary {
  std::string name;
  double mean = 0.0, sd = 0.0;
  double q025 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q975 = 0.0;
  double rhat = 1.0;
  double ess = 0.0;
  bool rhat_degenerate = false;
  bool ess_degenerate = false;
};

// Pooled moments/quantiles plus split R-hat and summed ESS for every value.
std::vector<ParamSummary> summarize(const sampler::ChainDraws& draws);

double max_rhat(std::span<const ParamSummary> summaries);

}  // namespace hiermc::diagnostics
