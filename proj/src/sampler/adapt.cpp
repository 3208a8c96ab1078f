#include "sampler/adapt.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace hiermc::sampler {

void DualAveraging::restart(double eps0) {
  mu = std::log(10.0 * eps0);
  log_eps = std::log(eps0);
  log_eps_bar = log_eps;
  h_bar = 0.0;
  count = 0;
}

void DualAveraging::observe(double accept_prob) {
  ++count;
  const double eta = 1.0 / (count + t0);
  h_bar = (1.0 - eta) * h_bar + eta * (target - accept_prob);
  log_eps = mu - std::sqrt(static_cast<double>(count)) / gamma * h_bar;
  const double w = std::pow(static_cast<double>(count), -kappa);
  log_eps_bar = w * log_eps + (1.0 - w) * log_eps_bar;
}

double DualAveraging::eps() const { return std::exp(log_eps); }
double DualAveraging::eps_averaged() const { return std::exp(log_eps_bar); }

void RunningVariance::reset(std::size_t dim) {
  mean.assign(dim, 0.0);
  m2.assign(dim, 0.0);
  n = 0;
}

void RunningVariance::add(std::span<const double> q) {
  ++n;
  for (std::size_t d = 0; d < q.size(); ++d) {
    const double delta = q[d] - mean[d];
    mean[d] += delta / static_cast<double>(n);
    m2[d] += delta * (q[d] - mean[d]);
  }
}

std::vector<double> RunningVariance::regularized() const {
  std::vector<double> v(mean.size(), 1.0);
  if (n < 2) return v;
  const double w = static_cast<double>(n) / (n + 5.0);
  for (std::size_t d = 0; d < v.size(); ++d) {
    const double var = m2[d] / static_cast<double>(n - 1);
    v[d] = std::max(w * var + 1e-3 * (5.0 / (n + 5.0)), 1e-12);
  }
  return v;
}

double find_reasonable_step_size(const PhaseState& state, const PotentialFn& potential,
                                 const ChainRandom& rng, std::uint64_t key_step,
                                 std::span<const double> mass, double eps0) {
  const std::size_t n = state.position.size();
  std::vector<double> p0(n);
  rng.fill_momentum(key_step, mass, p0);

  const double e0 = state.potential + kinetic_energy(p0, mass);
  double eps = eps0;

  const auto accept_at = [&](double e) -> double {
    PhaseState trial = state;
    trial.momentum = p0;
    if (!leapfrog(trial, potential, e, 1, mass)) return 0.0;
    const double dh = trial.potential + kinetic_energy(trial.momentum, mass) - e0;
    if (!std::isfinite(dh)) return 0.0;
    return dh < 0.0 ? 1.0 : std::exp(-dh);
  };

  double a = accept_at(eps);
  const bool grow = a > 0.5;
  for (int iter = 0; iter < 100; ++iter) {
    if (grow) {
      if (a <= 0.5) return eps;
      eps *= 2.0;
    } else {
      if (a >= 0.5) return eps;
      eps *= 0.5;
    }
    if (eps > 1e10 || eps < 1e-12)
      throw SamplingError("could not find a workable step size");
    a = accept_at(eps);
  }
  return eps;
}

namespace {

struct Window {
  int begin, end;
};

// Step-size buffer, doubling variance windows, terminal buffer. Returns the
// variance windows only; the buffers are whatever is left on each side.
std::vector<Window> variance_windows(int warmup, int& init_buffer, int& term_buffer) {
  init_buffer = 75;
  term_buffer = 150;
  int base = 25;
  if (init_buffer + term_buffer + base > warmup) {
    // Small warmup: keep the proportions sane.
    init_buffer = std::max(1, warmup * 15 / 100);
    term_buffer = std::max(1, warmup * 10 / 100);
    base = warmup - init_buffer - term_buffer;
    if (base <= 0) {
      init_buffer = warmup;
      term_buffer = 0;
      return {};
    }
  }
  std::vector<Window> windows;
  const int adapt_end = warmup - term_buffer;
  int cur = init_buffer, w = base;
  while (cur < adapt_end) {
    int end = cur + w;
    // If the doubled follow-up window would not fit, absorb the remainder now.
    if (end + 2 * w >= adapt_end) end = adapt_end;
    windows.push_back({cur, end});
    cur = end;
    w *= 2;
  }
  return windows;
}

}  // namespace

WarmupResult adapt_warmup_chain(PhaseState& state, const PotentialFn& potential,
                                const ChainRandom& rng, const SamplerConfig& config) {
  const std::size_t dim = state.position.size();
  WarmupResult out;
  out.metric.assign(dim, 1.0);
  std::vector<double> mass(dim, 1.0);

  DualAveraging da;
  da.target = config.target_accept;
  da.restart(find_reasonable_step_size(state, potential, rng,
                                       /*key_step=*/~std::uint64_t{0}, mass));

  int init_buffer = 0, term_buffer = 0;
  std::vector<Window> windows;
  if (config.adapt_metric)
    windows = variance_windows(config.warmup, init_buffer, term_buffer);
  std::size_t next_window = 0;
  RunningVariance rv;
  rv.reset(dim);

  for (int t = 0; t < config.warmup; ++t) {
    double eps = da.eps();
    if (config.stepsize_jitter > 0.0)
      eps *= 1.0 + config.stepsize_jitter *
                       (2.0 * rng.at(ChainRandom::kJitter, t).uniform() - 1.0);
    const HmcStepResult res =
        hmc_step(state, potential, rng, static_cast<std::uint64_t>(t), eps,
                 config.max_leapfrog, mass, config.divergence_threshold);
    da.observe(res.accept_prob);
    out.divergent += res.divergent;
    out.nonfinite += res.nonfinite;

    if (next_window < windows.size()) {
      const Window& w = windows[next_window];
      if (t >= w.begin) rv.add(state.position);
      if (t + 1 == w.end) {
        out.metric = rv.regularized();
        for (std::size_t d = 0; d < dim; ++d) mass[d] = 1.0 / out.metric[d];
        rv.reset(dim);
        ++next_window;
        da.restart(find_reasonable_step_size(state, potential, rng,
                                             ~std::uint64_t{0} - 1 - next_window, mass,
                                             da.eps_averaged()));
      }
    }
  }

  if (config.warmup > 0 && out.nonfinite * 2 > config.warmup)
    throw SamplingError("adaptation failed: " + std::to_string(out.nonfinite) + " of " +
                        std::to_string(config.warmup) +
                        " warmup iterations had non-finite trajectories");

  out.step_size = config.warmup > 0 ? da.eps_averaged() : da.eps();
  return out;
}

PotentialFn model_potential(const models::Model& model) {
  return [&model](std::span<const double> q, double& u, std::span<double> grad) {
    for (double qi : q)
      if (!std::isfinite(qi)) return false;
    double lp;
    try {
      lp = model.log_density(q, grad);
    } catch (const EvaluationError&) {
      return false;
    }
    if (!std::isfinite(lp)) return false;
    for (double& g : grad) {
      if (!std::isfinite(g)) return false;
      g = -g;
    }
    u = -lp;
    return true;
  };
}

WarmupResult adapt_warmup(const models::Model& model, const SamplerConfig& config,
                          const ChainRandom& rng, std::vector<double>& position) {
  config.validate();
  if (position.size() != model.dim())
    throw ShapeError("adapt_warmup: position has wrong dimension");
  const PotentialFn potential = model_potential(model);
  PhaseState state;
  state.position = position;
  state.momentum.assign(position.size(), 0.0);
  state.grad_potential.assign(position.size(), 0.0);
  if (!potential(state.position, state.potential, state.grad_potential))
    throw SamplingError("adapt_warmup: initial point has non-finite density");
  WarmupResult out = adapt_warmup_chain(state, potential, rng, config);
  position = state.position;
  return out;
}

}  // namespace hiermc::sampler
