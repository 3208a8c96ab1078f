#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "mathcore/dual.hpp"

namespace hiermc::mathcore {

// Exact gradient of a scalar field via one forward-mode sweep with identity seeds.
// `f` is callable on std::span<const Dual> and returns Dual. Throws EvaluationError
// naming the first offending coordinate if the value or any partial is non-finite.
template <class F>
std::vector<double> gradient(F&& f, std::span<const double> z) {
  const std::size_t n = z.size();
  std::vector<Dual> seeded;
  seeded.reserve(n);
  for (std::size_t i = 0; i < n; ++i) seeded.push_back(Dual::variable(z[i], i, n));
  Dual out = f(std::span<const Dual>(seeded));
  if (!std::isfinite(out.val))
    throw EvaluationError("gradient: non-finite function value");
  if (out.der.size() != n) out.der.resize(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(out.der[i]))
      throw EvaluationError("gradient: non-finite partial for coordinate " +
                            std::to_string(i));
  return out.der;
}

}  // namespace hiermc::mathcore
