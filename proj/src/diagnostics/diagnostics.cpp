#include "diagnostics/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace hiermc::diagnostics {

namespace {

double mean_of(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m += v;
  return x.empty() ? 0.0 : m / static_cast<double>(x.size());
}

// Sample variance, n-1 denominator; 0 for n < 2.
double variance_of(std::span<const double> x, double mean) {
  if (x.size() < 2) return 0.0;
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace

RhatResult split_rhat(std::span<const std::vector<double>> chains) {
  if (chains.empty()) throw DataError("split_rhat: no chains");
  const std::size_t n = chains.front().size();
  for (const auto& c : chains)
    if (c.size() != n) throw ShapeError("split_rhat: chains have unequal lengths");
  const std::size_t half = n / 2;
  if (half < 2) return {1.0, true};

  std::vector<double> group_means, group_vars;
  for (const auto& c : chains) {
    const std::span<const double> all(c);
    for (const auto part : {all.subspan(0, half), all.subspan(n - half, half)}) {
      const double m = mean_of(part);
      group_means.push_back(m);
      group_vars.push_back(variance_of(part, m));
    }
  }

  const double w = mean_of(group_vars);
  if (w <= 0.0) return {1.0, true};
  const double vm = variance_of(group_means, mean_of(group_means));
  const double var_plus =
      (static_cast<double>(half) - 1.0) / static_cast<double>(half) * w + vm;
  return {std::sqrt(var_plus / w), false};
}

EssResult effective_sample_size(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) return {static_cast<double>(n), true};
  const double m = mean_of(x);
  double g0 = 0.0;
  for (double v : x) g0 += (v - m) * (v - m);
  g0 /= static_cast<double>(n);
  if (g0 <= 0.0) return {static_cast<double>(n), true};

  const auto rho = [&](std::size_t t) {
    double g = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) g += (x[i] - m) * (x[i + t] - m);
    return g / (static_cast<double>(n) * g0);
  };

  // Initial positive sequence over paired sums rho_{2k} + rho_{2k+1}.
  double tau = -1.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = rho(2 * k) + rho(2 * k + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / 1.5);  // cap ESS at 1.5 n
  return {static_cast<double>(n) / tau, false};
}

EssResult effective_sample_size(std::span<const std::vector<double>> chains) {
  EssResult total{0.0, false};
  bool any_real = false;
  for (const auto& c : chains) {
    const EssResult one = effective_sample_size(std::span<const double>(c));
    total.value += one.value;
    any_real = any_real || !one.degenerate;
  }
  total.degenerate = !any_real;
  return total;
}

double quantile(std::vector<double> x, double p) {
  if (x.empty()) throw DataError("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: p must lie in [0,1]");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= x.size()) return x.back();
  return x[lo] + (h - static_cast<double>(lo)) * (x[lo + 1] - x[lo]);
}

std::vector<ParamSummary> summarize(const sampler::ChainDraws& draws) {
  std::vector<ParamSummary> out;
  out.reserve(draws.num_values());
  for (std::size_t v = 0; v < draws.num_values(); ++v) {
    ParamSummary s;
    s.name = draws.value_names[v];
    const std::vector<double> pooled = draws.pooled(v);
    if (pooled.empty()) throw DataError("summarize: no draws");
    s.mean = mean_of(pooled);
    s.sd = std::sqrt(variance_of(pooled, s.mean));
    s.q025 = quantile(pooled, 0.025);
    s.q25 = quantile(pooled, 0.25);
    s.q50 = quantile(pooled, 0.50);
    s.q75 = quantile(pooled, 0.75);
    s.q975 = quantile(pooled, 0.975);
    const auto per_chain = draws.per_chain(v);
    const RhatResult r = split_rhat(per_chain);
    s.rhat = r.value;
    s.rhat_degenerate = r.degenerate;
    const EssResult e =
        effective_sample_size(std::span<const std::vector<double>>(per_chain));
    s.ess = e.value;
    s.ess_degenerate = e.degenerate;
    out.push_back(std::move(s));
  }
  return out;
}

double max_rhat(std::span<const ParamSummary> summaries) {
  double m = 0.0;
  for (const auto& s : summaries)
    if (!s.rhat_degenerate) m = std::max(m, s.rhat);
  return m;
}

}  // namespace hiermc::diagnostics
