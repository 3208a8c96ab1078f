#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "core/errors.hpp"
#include "core/matrix.hpp"
#include "mathcore/dual.hpp"

namespace hiermc::mathcore {

inline constexpr double kLogTwoPi = 1.8378770664093453;    // ln(2*pi)
inline constexpr double kLogTwoOverPi = -0.4515827052894549;  // ln(2/pi)
inline constexpr double kPi = 3.141592653589793;

// log N(x | mu, sd). Normalized. sd must be positive.
template <class T>
T normal_lpdf(const T& x, const T& mu, const T& sd) {
  using std::log;
  if (!(value_of(sd) > 0.0)) throw DomainError("normal_lpdf: sd must be positive");
  T z = (x - mu) / sd;
  return T(-0.5 * kLogTwoPi) - log(sd) - T(0.5) * z * z;
}

// log of the half-Cauchy density 2 / (pi * scale * (1 + (x/scale)^2)) on x >= 0.
// The factor 2 makes it a normalized density on the half line.
template <class T>
T half_cauchy_lpdf(const T& x, const T& scale) {
  using std::log;
  using std::log1p;
  if (!(value_of(scale) > 0.0)) throw DomainError("half_cauchy_lpdf: scale must be positive");
  if (value_of(x) < 0.0) throw DomainError("half_cauchy_lpdf: x must be non-negative");
  T r = x / scale;
  return T(kLogTwoOverPi) - log(scale) - log1p(r * r);
}

// Unnormalized LKJ-Cholesky kernel on the log-diagonal: sum_{k=2..K} (K - k + 2*eta - 2) * ln L_kk.
// `diag` holds the K diagonal entries of a Cholesky factor of a correlation matrix.
template <class T>
T lkj_cholesky_kernel(std::span<const T> diag, double eta) {
  using std::log;
  T acc(0.0);
  const std::size_t K = diag.size();
  for (std::size_t k = 2; k <= K; ++k)
    acc += T(static_cast<double>(K - k) + 2.0 * eta - 2.0) * log(diag[k - 1]);
  return acc;
}

// Validating wrapper over the kernel. L must be lower-triangular with positive
// diagonal and unit row norms (each row of L L^T diagonal == 1) to within 1e-8.
double lkj_cholesky_lpdf(const Matrix& L, double eta);

// Quantile function of Cauchy(location, scale); w in (0,1).
double cauchy_inv_cdf(double w, double location, double scale);

// A validated 1-D density kernel (plus the LKJ matrix family). Carries just enough
// to evaluate a log density and to describe its support for quadrature checks.
class DensityKernel {
 public:
  enum class Family { kNormal, kHalfCauchy, kUniformInterval, kLkjCholesky };

  static DensityKernel normal(double mu, double sd);
  static DensityKernel half_cauchy(double scale);
  static DensityKernel uniform_interval(double lo, double hi);
  static DensityKernel lkj_cholesky(double eta);  // shape eta >= 1

  Family family() const { return family_; }
  double param1() const { return p1_; }
  double param2() const { return p2_; }

  // Scalar families only; throws ShapeError for the LKJ family.
  double lpdf(double x) const;
  // LKJ family only.
  double lpdf(const Matrix& cholesky_factor) const;

  // Support interval of the scalar families: normal (-inf, inf),
  // half-Cauchy [0, inf), uniform [lo, hi].
  double support_lo() const;
  double support_hi() const;

 private:
  DensityKernel(Family f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}
  Family family_;
  double p1_, p2_;
};

}  // namespace hiermc::mathcore
