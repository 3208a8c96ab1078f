#pragma once

#include <span>
#include <string>
#include <vector>

namespace hiermc::models {

// A posterior on an unconstrained real vector z. log_density returns the log
// posterior kernel (priors normalized where defined, Jacobians included) and, when
// `grad` is non-empty, fills the exact analytic gradient. `constrain` maps z to the
// reported parameter vector (may be longer than z: derived quantities included),
// whose entries are named by value_names(). coordinate_labels() names the
// unconstrained coordinates themselves; samplers key per-coordinate randomness on
// these labels so results depend on what a coordinate *is*, not where it sits.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t dim() const = 0;
  virtual double log_density(std::span<const double> z, std::span<double> grad) const = 0;
  virtual std::vector<double> constrain(std::span<const double> z) const = 0;
  virtual std::vector<std::string> value_names() const = 0;
  virtual std::vector<std::string> coordinate_labels() const = 0;
};

}  // namespace hiermc::models
